"""Feasibility seeking for finite families of unions of convex sets."""
