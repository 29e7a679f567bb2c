"""
PSL2 Subgroups Exceptions

Error hierarchy shared by the words, graph, counting and sampling layers.
The CLI maps these onto exit codes.

Author: PSL2 Subgroups Team
License: MIT
"""


class PSL2Error(Exception):
    """Base class for all library errors"""


class InvalidWordError(PSL2Error, ValueError):
    """Word text that cannot be parsed over {a, a^-1, b, b^-1}"""


class InvalidGraphError(PSL2Error, ValueError):
    """Graph data that fails the JSON schema or the structural checks"""


class InvalidSizeError(PSL2Error, ValueError):
    """Size outside the support of a family (no object of that size exists)"""


class UnknownFamilyError(PSL2Error, ValueError):
    """Family name not recognised"""


class NotRealizableError(PSL2Error, ValueError):
    """Combinatorial type with no proper cyclically reduced realization"""


class DegenerateSpeciesError(PSL2Error, ValueError):
    """Species polynomial violating s_d > 0 or integrality of i!*s_i"""


class TableCorruptionError(PSL2Error, ArithmeticError):
    """A division that must be exact was not, or a cache file is malformed"""
