"""Polynomial functors over finite sets, their lenses, and law checking for polynomial universes."""

from .errors import (
    CapExceeded,
    IndexOutOfRange,
    PolyError,
    PositionOverflow,
    PreconditionFailed,
    SearchExhausted,
    ShapeMismatch,
)
from .poly import Chart, Lens, Poly, Y, comp_lens, eq_lens, id_lens, is_cartesian
from .monoidal import Composite, Tensor, compose_poly, tensor
from .uparrow import UpGen, up, up_gen
from .distributor import Distributor, eq_distributor, eq_distributor_upto_iso, nabla
from .universes import UniversePoly, mk_ufin, mk_uprop
from .laws import LawReport, check_law

__version__ = "0.1.0"
