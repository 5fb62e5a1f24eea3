"""Exception types shared across the toolkit.

Every precondition named in a module contract maps to one class here, so
callers (and the CLI) can report the violated precondition by name.
"""


class GaborError(Exception):
    """Base class for all toolkit errors."""


# exact lattice algebra
class InvalidLattice(GaborError):
    """Singular basis, or lattice parameters violating a divisibility contract."""


class NotAnExtraShift(GaborError):
    """The shift (r, s) = (0, 0) is a lattice point, not an extra invariant shift."""


class InvalidOrder(GaborError):
    """Order parameter m out of range (m >= 2 required)."""


class InvalidIndex(GaborError):
    """Coset index q < 1."""


# density estimation
class InvalidModulus(GaborError):
    """Excluded-residue modulus nu < 2."""


class InvalidMatrix(GaborError):
    """Singular transformation matrix."""


# finite Gabor model
class InvalidParameter(GaborError):
    """Scalar parameter out of its admissible range (e.g. Gaussian width c <= 0)."""


class ZeroWindow(GaborError):
    """The window is (numerically) zero."""


class ZeroInput(GaborError):
    """A nonzero input signal is required."""


# invariance engine
class InvalidRefinement(GaborError):
    """Refinement does not divide the lattice steps."""


class InvalidNu(GaborError):
    """nu < 2 or nu does not divide the time step."""


class NotFrameSequence(GaborError):
    """The system is not a frame for its span (zero/degenerate window)."""


class DegenerateInput(GaborError):
    """Linearly dependent shift vectors."""


class NotUndersampled(GaborError):
    """The scenario requires a*b > L (density below one)."""


# metaplectic operators
class NotSymplectic(GaborError):
    """det B != 1 (mod L)."""


class UnsupportedLength(GaborError):
    """Chirp generators require odd L."""


class UnsupportedTransport(GaborError):
    """Operator and system live on different signal lengths."""
