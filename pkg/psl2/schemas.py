"""
Pydantic Schemas for graph files and CLI reports
"""
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator


class AStructSchema(BaseModel):
    """a-structure: loops and unordered pairs"""
    loops: List[int] = Field(default_factory=list, description="Vertices carrying an a-loop")
    pairs: List[Tuple[int, int]] = Field(default_factory=list, description="Isolated a-edges")


class BStructSchema(BaseModel):
    """b-structure: loops, directed edges and directed triangles"""
    loops: List[int] = Field(default_factory=list, description="Vertices carrying a b-loop")
    edges: List[Tuple[int, int]] = Field(default_factory=list, description="Isolated b-edges (source, target)")
    triangles: List[Tuple[int, int, int]] = Field(
        default_factory=list, description="b-triangles in cycle order, smallest vertex first"
    )


class GraphSchema(BaseModel):
    """JSON form of a Stallings graph"""
    n: int = Field(..., ge=1, description="Number of vertices, ids are 0..n-1")
    root: Optional[int] = Field(None, description="Root vertex, null for unrooted graphs")
    a: AStructSchema = Field(default_factory=AStructSchema)
    b: BStructSchema = Field(default_factory=BStructSchema)

    @field_validator('root')
    @classmethod
    def root_non_negative(cls, v):
        if v is not None and v < 0:
            raise ValueError('root must be a non-negative vertex id')
        return v

    @model_validator(mode='after')
    def ids_in_range(self):
        ids = list(self.a.loops) + list(self.b.loops)
        for items in (self.a.pairs, self.b.edges, self.b.triangles):
            for item in items:
                ids.extend(item)
        if self.root is not None:
            ids.append(self.root)
        bad = sorted({v for v in ids if not 0 <= v < self.n})
        if bad:
            raise ValueError(f'vertex ids {bad} outside [0, {self.n})')
        return self


class AnalysisReport(BaseModel):
    """Output of `analyze`"""
    combinatorial_type: List[int] = Field(..., description="(n, k2, k3, l2, l3, m)")
    index: Union[int, str] = Field(..., description="Index, or 'infinite'")
    free: bool
    rank: Optional[int] = Field(None, description="Free rank when the subgroup is free")
    isomorphism_type: List[int] = Field(..., description="(l2, l3, r)")
    basis: Dict[str, List[str]] = Field(..., description="Independent generating set by kind")
    cyclically_reduced: bool
    canonical_form: str = Field(..., description="Canonical byte string, hex encoded")


class CountRow(BaseModel):
    """One row of the subgroup counting table"""
    size: int = Field(..., ge=1)
    all: int = Field(..., description="H_n, all subgroups of size n")
    finite_index: int = Field(..., description="Subgroups of index n")
    cr_free: int = Field(..., description="Free subgroups with a cyclically reduced graph")
    free: int = Field(..., description="Free subgroups")
    free_finite_index: int = Field(..., description="Free subgroups of index n")


class VerifyReport(BaseModel):
    """Pass/fail matrix of `verify --oracle`"""
    max_size: int
    results: Dict[str, Dict[int, bool]] = Field(..., description="family -> size -> agreement")
    passed: bool
