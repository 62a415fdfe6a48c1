"""Spatiotemporal persistence of dynamic metric spaces and erosion distances between them."""

from .dms import DynamicMetricSpace, TimeGrid, TimeIntervalIndex, aggregate_semimetric
from .dynmodule import DynGrid, ThinDynModule, build_dyn_module, decompose, verify_acd
from .erosion import GridModule, erosion_distance, erosion_distance_dyn, erosion_distance_oracle
from .rips import SmallDiagram, rips_diagram_small

__version__ = "0.1.0"
