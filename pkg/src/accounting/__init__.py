"""Privacy accounting."""

from .rdp_accountant import (
    DEFAULT_MAX_ORDER,
    order_grid,
    laplace_rdp,
    subsampled_laplace_rdp,
    rdp_curve,
    compose,
    combine,
    rdp_to_dp,
    dp_to_delta,
    budget_table,
    privgnn_rdp_curve,
    crude_epsilon,
    privgnn_budget,
    pate_rdp_curve,
    pate_budget,
    pure_dp_epsilon,
    describe_budget,
)

__all__ = [
    'DEFAULT_MAX_ORDER',
    'order_grid',
    'laplace_rdp',
    'subsampled_laplace_rdp',
    'rdp_curve',
    'compose',
    'combine',
    'rdp_to_dp',
    'dp_to_delta',
    'budget_table',
    'privgnn_rdp_curve',
    'crude_epsilon',
    'privgnn_budget',
    'pate_rdp_curve',
    'pate_budget',
    'pure_dp_epsilon',
    'describe_budget',
]
