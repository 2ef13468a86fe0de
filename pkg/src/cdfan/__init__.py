"""cd-index of complete fans, computed from flag vectors and from the
Lefschetz main construction on section modules."""

__version__ = "0.1.0"

from .flag import CdPolynomial, cd_index, flag_f, flag_h, phi_expand, simplicial_h  # noqa: E402
from .poset import GradedPoset, build_named, incidence_orientation, ingest, serialize, validate  # noqa: E402

__all__ = [
    "__version__", "CdPolynomial", "GradedPoset", "build_named", "cd_index", "flag_f", "flag_h",
    "incidence_orientation", "ingest", "phi_expand", "serialize", "simplicial_h", "validate",
]
