"""Reverse-mode automatic differentiation on a define-by-run tape.

Every operation appends a :class:`Node` to the :class:`Tape` of its inputs.
Creation order is a valid topological order, so :func:`backward` only needs
a reverse walk over the tape.  Node values are float64 numpy arrays;
operations broadcast like numpy and gradients are reduced back to the input
shape.

>>> tape = Tape()
>>> x = tape.leaf(3.0)
>>> y = square(x)
>>> backward(y)[x]
array(6.)
"""
from __future__ import annotations

import numpy as np

from vqs import kernels
from vqs.errors import ContractError, NumericDomainError

__all__ = [
    "Node", "Tape", "backward", "forward_op",
    "add", "sub", "mul", "div", "matvec", "dot", "relu", "sin", "square",
    "sum", "reshape", "affine",
]


class Node:
    __slots__ = ("tape", "value", "parents", "grad", "requires_grad", "index")

    def __init__(self, tape, value, parents=(), requires_grad=False):
        self.tape = tape
        self.value = value
        # (parent, vector-Jacobian closure) pairs
        self.parents = parents
        self.grad = None
        self.requires_grad = requires_grad
        self.index = tape._record(self)

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Node(#{self.index}, shape={self.value.shape})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __matmul__(self, other):
        return matvec(self, other)


class Tape:
    """Ordered node storage.  One tape per forward/backward pass."""

    def __init__(self):
        self.nodes = []

    def __len__(self):
        return len(self.nodes)

    def release(self) -> None:
        """Drop every node so its arrays are freed without waiting for the GC.

        Nodes reference their tape, so a finished graph is a reference
        cycle; long training loops call this after each backward pass.
        """
        for node in self.nodes:
            node.parents = ()
            node.grad = None
        self.nodes = []

    def _record(self, node):
        self.nodes.append(node)
        return len(self.nodes) - 1

    def leaf(self, value) -> Node:
        """A differentiable input (parameter)."""
        return Node(self, np.array(value, dtype=np.float64), requires_grad=True)

    def constant(self, value) -> Node:
        return Node(self, np.asarray(value, dtype=np.float64))


def _lift(x, tape):
    if isinstance(x, Node):
        if x.tape is not tape:
            raise ContractError("operands live on different tapes")
        return x
    return tape.constant(x)


def _tape_of(*xs):
    for x in xs:
        if isinstance(x, Node):
            return x.tape
    raise ContractError("at least one operand must be a Node")


def _unbroadcast(grad, shape):
    """Sum ``grad`` over the axes that broadcasting added to ``shape``."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _make(tape, value, pairs):
    """Create an op node; parents that need no gradient are pruned."""
    pairs = tuple((p, fn) for p, fn in pairs if p.requires_grad)
    return Node(tape, value, pairs, requires_grad=bool(pairs))


def add(a, b) -> Node:
    tape = _tape_of(a, b)
    a, b = _lift(a, tape), _lift(b, tape)
    return _make(tape, a.value + b.value, (
        (a, lambda g: _unbroadcast(g, a.value.shape)),
        (b, lambda g: _unbroadcast(g, b.value.shape)),
    ))


def sub(a, b) -> Node:
    tape = _tape_of(a, b)
    a, b = _lift(a, tape), _lift(b, tape)
    return _make(tape, a.value - b.value, (
        (a, lambda g: _unbroadcast(g, a.value.shape)),
        (b, lambda g: -_unbroadcast(g, b.value.shape)),
    ))


def mul(a, b) -> Node:
    tape = _tape_of(a, b)
    a, b = _lift(a, tape), _lift(b, tape)
    return _make(tape, a.value * b.value, (
        (a, lambda g: _unbroadcast(g * b.value, a.value.shape)),
        (b, lambda g: _unbroadcast(g * a.value, b.value.shape)),
    ))


def div(a, b) -> Node:
    tape = _tape_of(a, b)
    a, b = _lift(a, tape), _lift(b, tape)
    if np.any(b.value == 0.0):
        raise NumericDomainError("division by zero")
    out = a.value / b.value
    return _make(tape, out, (
        (a, lambda g: _unbroadcast(g / b.value, a.value.shape)),
        (b, lambda g: _unbroadcast(-g * out / b.value, b.value.shape)),
    ))


def matvec(A, x) -> Node:
    """Matrix product ``A @ x`` for 2-D ``A`` and 1-D or 2-D ``x``."""
    tape = _tape_of(A, x)
    A, x = _lift(A, tape), _lift(x, tape)
    if A.value.ndim != 2 or x.value.ndim not in (1, 2):
        raise ContractError(f"matvec needs 2-D @ 1-D/2-D, got {A.shape} @ {x.shape}")
    if x.value.ndim == 1:
        grad_A = lambda g: np.outer(g, x.value)
    else:
        grad_A = lambda g: g @ x.value.T
    return _make(tape, A.value @ x.value, (
        (A, grad_A),
        (x, lambda g: A.value.T @ g),
    ))


def dot(a, b) -> Node:
    """Inner product of two 1-D nodes (a 0-d result)."""
    tape = _tape_of(a, b)
    a, b = _lift(a, tape), _lift(b, tape)
    if a.value.ndim != 1 or a.value.shape != b.value.shape:
        raise ContractError(f"dot needs equal-length vectors, got {a.shape} and {b.shape}")
    return _make(tape, np.asarray(a.value @ b.value), (
        (a, lambda g: g * b.value),
        (b, lambda g: g * a.value),
    ))


def relu(a) -> Node:
    """max(a, 0); the subgradient at exactly 0 is 0."""
    tape = _tape_of(a)
    out = kernels.relu_forward(a.value)
    return _make(tape, out, ((a, lambda g: kernels.relu_backward(g, out)),))


def sin(a) -> Node:
    tape = _tape_of(a)
    return _make(tape, np.sin(a.value), ((a, lambda g: g * np.cos(a.value)),))


def square(a) -> Node:
    tape = _tape_of(a)
    return _make(tape, a.value * a.value, ((a, lambda g: 2.0 * g * a.value),))


def sum(a, axis=None) -> Node:  # noqa: A001 - mirrors numpy naming
    tape = _tape_of(a)
    shape = a.value.shape
    out = np.asarray(a.value.sum(axis=axis))
    if axis is None:
        back = lambda g: np.broadcast_to(g, shape).copy()
    else:
        back = lambda g: np.broadcast_to(np.expand_dims(g, axis), shape).copy()
    return _make(tape, out, ((a, back),))


def reshape(a, shape) -> Node:
    tape = _tape_of(a)
    old = a.value.shape
    return _make(tape, a.value.reshape(shape), ((a, lambda g: g.reshape(old)),))


def affine(h, W, b) -> Node:
    """Fused dense layer ``h @ W + b`` for a batch ``h`` of shape (B, fan_in).

    Equivalent to ``add(matvec(h, W), b)`` but avoids the broadcast
    temporaries; a single-column ``h`` uses the compiled outer-product kernel.
    """
    tape = _tape_of(h, W, b)
    h, W, b = _lift(h, tape), _lift(W, tape), _lift(b, tape)
    hv, Wv = h.value, W.value
    if hv.ndim != 2 or Wv.ndim != 2 or hv.shape[1] != Wv.shape[0] or b.value.shape != (Wv.shape[1],):
        raise ContractError(f"affine shapes incompatible: {hv.shape}, {Wv.shape}, {b.value.shape}")
    if hv.shape[1] == 1:
        out = kernels.scalar_affine(hv[:, 0], Wv[0], b.value)
    else:
        out = hv @ Wv
        out += b.value
    return _make(tape, out, (
        (h, lambda g: g @ Wv.T),
        (W, lambda g: hv.T @ g),
        (b, lambda g: g.sum(axis=0)),
    ))


_OPS = {
    "add": add, "sub": sub, "mul": mul, "div": div, "matvec": matvec,
    "dot": dot, "relu": relu, "sin": sin, "square": square, "sum": sum,
}


def forward_op(name: str, *inputs) -> Node:
    """Dispatch an operation by name."""
    try:
        op = _OPS[name]
    except KeyError:
        raise ContractError(f"unknown operation {name!r}") from None
    return op(*inputs)


def backward(root: Node) -> dict:
    """Propagate d(root)/d(node) through the tape of ``root``.

    Gradients are reset before every pass, so calling this twice yields the
    same result rather than a doubled one.  Returns a mapping from each leaf
    on the tape to its gradient; leaves that are not ancestors of ``root``
    get zeros.
    """
    if not isinstance(root, Node):
        raise ContractError("backward needs a Node")
    if root.value.size != 1:
        raise ContractError(f"backward root must be scalar, got shape {root.value.shape}")
    nodes = root.tape.nodes
    for node in nodes:
        node.grad = None
    root.grad = np.ones_like(root.value)
    for node in reversed(nodes[: root.index + 1]):
        g = node.grad
        if g is None:
            continue
        for parent, vjp in node.parents:
            contribution = vjp(g)
            if parent.grad is None:
                parent.grad = contribution
            else:
                parent.grad = parent.grad + contribution
    grads = {}
    for node in nodes:
        if node.requires_grad and not node.parents:
            if node.grad is None:
                node.grad = np.zeros_like(node.value)
            else:
                # vjps may hand the same array to several parents
                node.grad = np.array(node.grad, dtype=np.float64)
            grads[node] = node.grad
    return grads
