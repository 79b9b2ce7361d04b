"""Discrete fractional trace norms on polygon and polyhedron boundaries."""

from ._tracenorm import (
    BoundaryMesh,
    EquivalenceReport,
    LocalizationStudy,
    MeshHierarchy,
    TracenormError,
    h_half_matrix,
    make_geometry,
    mass_matrix,
    read_mesh,
    run_config,
    slobodeckij_matrix,
    supported_statements,
    version,
)

__version__ = version()
