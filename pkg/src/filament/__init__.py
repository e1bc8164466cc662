"""
Closed vortex filaments through the spectral theory of the Zakharov-Shabat
operator: the Hasimoto map, Floquet data and closure tests, and isoperiodic
deformations of finite-gap spectral surfaces.
"""

from .bloch import (ClosureReport, MonodromyResult, PointKind, RealPointClass, Verdict,
                    bloch_eigenvectors, closure_check, discriminant_scan,
                    double_point_integral_check, find_real_double_points, monodromy,
                    quasimomentum_derivative, quasimomentum_fd, spectrum_report)
from .curves import (FrameField, SampledCurve, frenet_data, read_curve_csv,
                     resample_arclength, rotated_frame, write_curve_csv)
from .errors import (DegenerateSurfaceError, FilamentError, NonFiniteError, NumericalError,
                     ValidationError)
from .finitegap import (DeformationState, QuasimomentumDiff, SpectralSurface,
                        check_periodicity, deformation_rhs, genus1_filament_start,
                        initial_state, integrate_flow, normalize_quasimomentum,
                        surface_from_constant_potential)
from .hasimoto import (PotentialSignal, ReconstructionConfig, closure_test_frame, gauge_shift,
                       hasimoto_forward, reconstruct_curve)

__version__ = "0.1.0"
