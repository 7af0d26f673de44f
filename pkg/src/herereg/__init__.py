"""Robust rigid registration from putative 3D correspondences."""
