"""Sustained high-frequency oscillations in hyperbolic-parabolic systems.

Submodules:

- ``dispersion``: roots of the Fourier-mode cubic, asymptotic expansions, acoustic tensors
- ``amplitude``: amplitude ODE integration and the mode-energy identity
- ``linearwaves``: exact oscillating plane waves of the linear systems
- ``materials``: nonmonotone constitutive laws and stored energies built by window transport
- ``gas``: the adiabatic gas family, uniform extensions and the interface construction
- ``constructors``: exact oscillating weak solutions, rescaled sequences and weak limits
- ``weakform``: jump conditions, weak-form residuals and weak-convergence rates
- ``fdsolver``: finite-difference cross-validation for the viscoelastic bar
- ``cli``: the ``oscilab`` command
"""

__version__ = "0.1.0"
