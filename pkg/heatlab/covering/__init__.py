"""Maximal functions, CZ decompositions and covering lemmas on finite metric measure spaces."""

from heatlab.covering.cz import calibrate_precondition, check_properties, cz_decompose, reconstruct
from heatlab.covering.maximal import maximal_function, maximal_function_exhaustive
from heatlab.covering.separated import card_fit, separated_set
from heatlab.covering.space import FiniteMetricMeasureSpace, random_instance, read_instance, write_instance
from heatlab.covering.sums import exp_sum_check, gaussian_sum_check

__all__ = [
    "FiniteMetricMeasureSpace",
    "calibrate_precondition",
    "card_fit",
    "check_properties",
    "cz_decompose",
    "exp_sum_check",
    "gaussian_sum_check",
    "maximal_function",
    "maximal_function_exhaustive",
    "random_instance",
    "read_instance",
    "reconstruct",
    "separated_set",
    "write_instance",
]
