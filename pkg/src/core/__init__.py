"""Grids, fields, calculus and persistence shared by every module."""
