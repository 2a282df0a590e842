"""Continuous-time quantum walks of the clocking cursor in Feynman's computer."""

from .amplitudes import amplitude_profile, closed_form_amplitude, theta
from .basis import (Basis, BasisLabel, Control, CursorState, ProgramLineSpec, initial_state,
                    prob_of, superposition)
from .hamiltonian import (HermitianOperator, build, build_double_trap, build_sequential,
                          build_telomeric, control_flip, full_spin_oracle)
from .observables import (TimeSeries, bound_eq13, bound_eq14, completion_probability,
                          control_resolved_probability)
from .propagator import (EvolutionResult, PulseSchedule, Segment, evolve_const, evolve_schedule,
                         make_pi_pulse_schedule)

__version__ = "0.1.0"
