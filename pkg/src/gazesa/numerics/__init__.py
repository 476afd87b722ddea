"""Numeric kernels: KDE, mutual information, PCA, entropy, correlation."""

from .correlation import CorrelationResult, kendall, pearson, permutation_pvalue, rankdata, spearman
from .information import mutual_information, shannon_entropy, stationary_distribution
from .kde import DensityModel, kde_fit
from .pca import PcaModel, pca_first_component
from .special import betainc, normal_two_sided, student_t_two_sided

__all__ = [
    "CorrelationResult",
    "DensityModel",
    "PcaModel",
    "betainc",
    "kde_fit",
    "kendall",
    "mutual_information",
    "normal_two_sided",
    "pca_first_component",
    "pearson",
    "permutation_pvalue",
    "rankdata",
    "shannon_entropy",
    "spearman",
    "stationary_distribution",
    "student_t_two_sided",
]
