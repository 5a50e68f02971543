"""Pattern counts in random rooted planar maps: exact series, intersection
catalogs, singularity constants and uniform sampling."""

__version__ = "0.1.0"

from .asymptotics import (BMJSystem, ConstantsReport, build_bmj_system, constants_for_catalog,
                          gw_condition_check, lemm_factorial_check, pattern_constants,
                          ratio_asymptotic_check, solve_and_differentiate)
from .enumeration import (CountTable, MarkingTerm, SeriesFamily, factorial_moment_exact,
                          solve_map_dde, solve_marked_dde, tutte_count)
from .generate import brute_force_maps
from .intersections import IntersectionCatalog, enumerate_intersection_types, overcount_check
from .maps import (BoundaryShape, Pattern, RootedMap, boundary_shape, builtin_pattern,
                   find_occurrences, load_pattern, polygon_pattern)
from .sampler import SamplerTables, StatsReport, build_sampler_tables, empirical_stats, sample_uniform_map
from .series import TruncatedSeries, coeff, divided_difference_u, series_add, series_mul

__all__ = [
    "BMJSystem", "BoundaryShape", "ConstantsReport", "CountTable", "IntersectionCatalog",
    "MarkingTerm", "Pattern", "RootedMap", "SamplerTables", "SeriesFamily", "StatsReport",
    "TruncatedSeries", "boundary_shape", "brute_force_maps", "build_bmj_system",
    "build_sampler_tables", "builtin_pattern", "coeff", "constants_for_catalog",
    "divided_difference_u", "empirical_stats", "enumerate_intersection_types",
    "factorial_moment_exact", "find_occurrences", "gw_condition_check", "lemm_factorial_check",
    "load_pattern", "overcount_check", "pattern_constants", "polygon_pattern",
    "ratio_asymptotic_check", "sample_uniform_map", "series_add", "series_mul",
    "solve_and_differentiate", "solve_map_dde", "solve_marked_dde", "tutte_count",
]
