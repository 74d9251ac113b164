"""synthval: evaluation toolkit for synthetic image corpora."""

__version__ = "0.1.0"

from .embedding import (FeatureMatrix, GaussianSummary, embed_dataset,
                        gaussian_summary, read_features, write_features)
from .equivariance import EquivarianceConfig, eq_score, resolve_operator
from .genmetrics import KidConfig, fid, frechet_distance, kid
from .imagecore import (DatasetManifest, ImageBuffer, TransformSpec,
                        apply_transform, load_dataset, psnr, read_manifest)
from .spectral import (SpectrumMap, average_power_spectrum, fft2_amplitude,
                       spectral_divergence, spectrum_slice)
from .statlab import (BootstrapResult, ContingencyTable2x2, MetricSeries,
                      TestResult, bootstrap_mean_ci, chi_square_2x2,
                      ecdf_percentile, ema_update, mann_whitney_u, r1_penalty,
                      read_series, shapiro_wilk, tail_fraction)
