"""Fractional area and nonlocal mean curvature of hypersurfaces with boundary."""

from .area import Domain, Region, area_constant, area_limit_scan, classical_ps_oracle, per_s_estimate
from .curvature import Estimate, QuadratureSpec, fmc_estimate, fmc_graph, fmc_polar_2d
from .errors import *  # noqa: F401,F403
from .flow import FlowConfig, FlowState, audit_state, connectivity_report, flow_run, flow_step, initial_state
from .geometry import Hypersurface, Params, build_polyline, build_polylines, build_trimesh, sphere_measure
from .probes import ContactReport, Verdict, slide_ball, slide_hyperplane
from .sides import SideLabel, classify, classify_many, normal_at

__version__ = "0.1.0"
