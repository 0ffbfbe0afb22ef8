"""Dense tensors with reverse-mode differentiation"""

from .gradcheck import finite_difference_gradient, max_relative_error
from .ops import (
    Activation,
    activation,
    add,
    add_bias,
    concat,
    gelu,
    layer_norm,
    linear,
    log,
    matmul,
    multiply,
    scale,
    sigmoid,
    softmax,
    subtract,
    take,
    take_slice,
    tanh,
    total,
    transpose,
)
from .tensor import GradTape, NonFiniteError, ShapeError, Tensor, current_tape
