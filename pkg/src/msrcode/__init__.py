"""Access- and update-aware (k+2, k) MSR codes over small finite fields."""

from .gf import GF, FieldElement, FieldSpec, primitive_element
from .linalg import ColumnVector, Matrix, SingularMatrixError, inverse, rank, solve
from .partition import Partition, axis_of, standard_partition
from .codes import (
    CodeId,
    CodeSpec,
    ConstructionError,
    ConstructionParams,
    NodeParams,
    PairType,
    RepairForm,
    RepairKind,
    build_c1,
    build_c2,
    build_c3,
    build_c4,
    build_code,
    build_generic,
    build_long_mds,
    build_modified_zigzag,
    dumps,
    loads,
    minimal_field,
    table1_report,
)

__version__ = "0.1.0"
