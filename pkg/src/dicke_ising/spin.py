"""Spin-1/2 operator matrices in the S^z product basis (|up>, |down>)."""

import numpy as np

SX = np.array([[0.0, 0.5], [0.5, 0.0]])
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]])
SZ = np.array([[0.5, 0.0], [0.0, -0.5]])
SMINUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # S^- = S^x - i S^y, maps up -> down
SPLUS = SMINUS.T.copy()
ID2 = np.eye(2)
