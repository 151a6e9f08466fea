"""Functional controllability/observability analysis and observer-based functional control."""
from .criteria import (
    FunctionalTarget,
    PropertyReport,
    SystemTriple,
    classical_properties,
    dual,
    is_functional_controllable,
    is_functional_detectable,
    is_functional_observable,
    is_functional_stabilizable,
    is_target_output_controllable,
    property_report,
)
from .numlin import DEFAULT_TOL, TolerancePolicy
from .sim import SimConfig, decay_rate, simulate_lti, simulate_observer_closed_loop
from .synthesis import (
    assemble_separation,
    build_augmentation_thm16,
    controller_conditions,
    design_functional_controller,
    design_functional_observer,
    design_observer_based_controller,
    find_controller_augmentation,
    find_observer_augmentation,
    observer_conditions,
    verify_observer,
)

__version__ = "0.1.0"
