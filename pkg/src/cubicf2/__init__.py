"""Cubic surfaces over F_2, finite matrix groups over GF(2^k), and the Jordan
constant of the plane Cremona group over F_2, F_4 and F_8."""

__version__ = "0.1.0"
