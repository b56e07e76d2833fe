# -*- coding: utf-8 -*-
"""
binentpy: certified generalized binary entropy inequality

    alpha_k h(x^k) >= x^(k-1) h(x),  0 <= x <= 1, real k > 1,

with alpha_k the positive root of x (1 + x)^(k-1) = 1, and checks of the
approximate k-union-closed bound that follows from it on small families.
"""
__all__ = ["scalar_core",
           "interval_core",
           "alpha_solver",
           "inequality_verifier",
           "setfamily_lab",
           "cli"]

__version__ = "0.1.0"
