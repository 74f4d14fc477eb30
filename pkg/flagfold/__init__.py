from .core.flagcore import FlagRep, lambda_to_mu, mu_to_lambda, type_of, decompose, compose, dimension, sbar, embed_grassmannian
from .core.stratify import coarser, project_flag, block_indices, horizontal_project, cell_of
from .core.distances import euclidean_distance, principal_angles, grassmann_distance, krakus_distance, conic_distance
from .core.riemann import PinchFunction, TangentVector, default_pinch, mu_slice, metric_eval, path_length, path_energy
from .core.geodesic import GeodesicState, Trajectory, Termination, initial_state, mu_acceleration, recover_B, expm_skew, shoot
from .core.geodesic import conserved_momentum, euclidean_geodesic, ellipsoid_frames, angle_diagnostics
from .core.measures import PointCloudFlagfold, PointCloudVarifold, mass, local_covariance, varifold_to_flagfold, flagfold_to_varifolds
from .core.measures import dimension_field, pushforward, first_variation, monotonicity_ratio, density_ratio
from .core.fields import VectorFieldWithJacobian, MapWithJacobian
from .core.cli import run

__version__ = "0.1.0"
