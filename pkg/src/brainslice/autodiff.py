"""Reverse-mode automatic differentiation over dense float32 tensors.

A ``Graph`` is a define-by-run tape: every operation appends a node holding
the forward value and a closure that maps the output gradient to gradients
for the node's inputs.  ``backward`` walks the tape in reverse and fills
``graph.gradients`` (node id -> ndarray).

All values are float32 by default; a graph may be built at float64 for
numerical harnesses (finite differences), which is what ``grad_check`` does
internally.  Ops never broadcast: shapes must match exactly, except for the
documented scalar variants.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Graph",
    "Tensor",
    "NonFiniteError",
    "backward",
    "grad_check",
    "conv2d",
    "conv2d_transpose",
    "upsample_nearest",
    "dense",
    "batchnorm",
    "relu",
    "leaky_relu",
    "sigmoid",
    "tanh",
    "activation",
    "dropout",
    "reshape",
    "flatten",
    "add",
    "sub",
    "mul",
    "log",
    "clip",
]


class NonFiniteError(ArithmeticError):
    """A tensor that must be finite contains NaN or Inf."""


class _Node:
    __slots__ = ("nid", "op", "inputs", "value", "attrs", "vjp")

    def __init__(self, nid, op, inputs, value, attrs, vjp):
        self.nid = nid
        self.op = op
        self.inputs = inputs  # tuple of input node ids
        self.value = value    # forward result, ndarray
        self.attrs = attrs    # op attributes (stride, padding, ...)
        self.vjp = vjp        # grad_out -> tuple of per-input gradients


class Graph:
    """Gradient tape.  Nodes are stored in creation order, which is a
    topological order by construction (inputs are created before consumers)."""

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self.nodes: list[_Node] = []
        self.gradients: dict[int, np.ndarray] = {}

    def leaf(self, data, name=None) -> "Tensor":
        """Add an input/parameter node (no upstream dependencies)."""
        value = np.asarray(data, dtype=self.dtype)
        return self._record("leaf", (), value, {"name": name}, None)

    def _record(self, op, inputs, value, attrs, vjp) -> "Tensor":
        nid = len(self.nodes)
        self.nodes.append(_Node(nid, op, tuple(inputs), value, attrs, vjp))
        return Tensor(self, nid)


class Tensor:
    """Lightweight handle to a graph node."""

    __slots__ = ("graph", "nid")

    def __init__(self, graph: Graph, nid: int):
        self.graph = graph
        self.nid = nid

    @property
    def data(self) -> np.ndarray:
        return self.graph.nodes[self.nid].value

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __repr__(self):
        return f"Tensor(nid={self.nid}, shape={self.shape})"

    # arithmetic sugar
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def sum(self):
        return _reduce(self, "sum")

    def mean(self):
        return _reduce(self, "mean")

    def reshape(self, shape):
        return reshape(self, shape)


def _same_graph(*tensors) -> Graph:
    g = tensors[0].graph
    for t in tensors[1:]:
        if t.graph is not g:
            raise ValueError("tensors belong to different graphs")
    return g


# ---------------------------------------------------------------------------
# elementwise / structural ops
# ---------------------------------------------------------------------------

def add(x: Tensor, y) -> Tensor:
    if isinstance(y, Tensor):
        g = _same_graph(x, y)
        if x.shape != y.shape:
            raise ValueError(f"add: shape {x.shape} != {y.shape}")
        xv, yv = x.data, y.data
        return g._record("add", (x.nid, y.nid), xv + yv, {},
                         lambda gr: (gr, gr))
    g = x.graph
    c = g.dtype.type(y)
    return g._record("add_scalar", (x.nid,), x.data + c, {"c": float(y)},
                     lambda gr: (gr,))


def sub(x: Tensor, y: Tensor) -> Tensor:
    g = _same_graph(x, y)
    if x.shape != y.shape:
        raise ValueError(f"sub: shape {x.shape} != {y.shape}")
    return g._record("sub", (x.nid, y.nid), x.data - y.data, {},
                     lambda gr: (gr, -gr))


def mul(x: Tensor, y) -> Tensor:
    if isinstance(y, Tensor):
        g = _same_graph(x, y)
        if x.shape != y.shape:
            raise ValueError(f"mul: shape {x.shape} != {y.shape}")
        xv, yv = x.data, y.data
        return g._record("mul", (x.nid, y.nid), xv * yv, {},
                         lambda gr: (gr * yv, gr * xv))
    g = x.graph
    c = g.dtype.type(y)
    return g._record("mul_scalar", (x.nid,), x.data * c, {"c": float(y)},
                     lambda gr: (gr * c,))


def log(x: Tensor) -> Tensor:
    g = x.graph
    xv = x.data
    return g._record("log", (x.nid,), np.log(xv), {},
                     lambda gr: (gr / xv,))


def clip(x: Tensor, lo: float, hi: float) -> Tensor:
    """Clamp to [lo, hi]; gradient is 1 strictly inside the interval, 0 outside."""
    g = x.graph
    xv = x.data
    out = np.clip(xv, lo, hi)
    inside = ((xv > lo) & (xv < hi)).astype(xv.dtype)
    return g._record("clip", (x.nid,), out, {"lo": lo, "hi": hi},
                     lambda gr: (gr * inside,))


def _reduce(x: Tensor, kind: str) -> Tensor:
    g = x.graph
    xv = x.data
    if kind == "sum":
        val = xv.sum(dtype=np.float64).astype(g.dtype)
        scale = g.dtype.type(1.0)
    else:
        val = xv.mean(dtype=np.float64).astype(g.dtype)
        scale = g.dtype.type(1.0 / xv.size)
    return g._record(kind, (x.nid,), np.asarray(val), {},
                     lambda gr: (np.broadcast_to(gr * scale, xv.shape),))


def reshape(x: Tensor, shape) -> Tensor:
    g = x.graph
    xv = x.data
    shape = tuple(int(s) for s in shape)
    out = xv.reshape(shape)
    return g._record("reshape", (x.nid,), out, {"shape": shape},
                     lambda gr: (gr.reshape(xv.shape),))


def flatten(x: Tensor) -> Tensor:
    """[N, ...] -> [N, prod(...)]."""
    n = x.shape[0]
    return reshape(x, (n, int(np.prod(x.shape[1:]))))


# ---------------------------------------------------------------------------
# activations
# ---------------------------------------------------------------------------

def relu(x: Tensor) -> Tensor:
    g = x.graph
    xv = x.data
    pos = (xv >= 0).astype(xv.dtype)  # subgradient at 0 is the x>=0 branch
    return g._record("relu", (x.nid,), xv * pos, {}, lambda gr: (gr * pos,))


def leaky_relu(x: Tensor, alpha: float = 0.2) -> Tensor:
    g = x.graph
    xv = x.data
    slope = np.where(xv >= 0, xv.dtype.type(1), xv.dtype.type(alpha))
    return g._record("leaky_relu", (x.nid,), xv * slope, {"alpha": alpha},
                     lambda gr: (gr * slope,))


def sigmoid(x: Tensor) -> Tensor:
    g = x.graph
    xv = x.data
    # stable in both tails
    out = np.where(xv >= 0, 1.0 / (1.0 + np.exp(-np.abs(xv))),
                   np.exp(-np.abs(xv)) / (1.0 + np.exp(-np.abs(xv)))).astype(xv.dtype)
    return g._record("sigmoid", (x.nid,), out, {},
                     lambda gr: (gr * out * (1 - out),))


def tanh(x: Tensor) -> Tensor:
    g = x.graph
    out = np.tanh(x.data)
    return g._record("tanh", (x.nid,), out, {},
                     lambda gr: (gr * (1 - out * out),))


_ACTIVATIONS = {"relu": relu, "leaky_relu": leaky_relu, "sigmoid": sigmoid,
                "tanh": tanh}


def activation(x: Tensor, kind: str, alpha: float = 0.2) -> Tensor:
    """Dispatch by name; ``alpha`` only applies to leaky_relu."""
    if kind not in _ACTIVATIONS:
        raise ValueError(f"unknown activation {kind!r}")
    if kind == "leaky_relu":
        return leaky_relu(x, alpha)
    return _ACTIVATIONS[kind](x)


def dropout(x: Tensor, rate: float, seed: int, mode: str = "train") -> Tensor:
    """Inverted dropout: zero with probability ``rate``, scale survivors by
    1/(1-rate).  Inference is the identity.  The mask is a pure function of
    (seed, shape), so a fixed seed reproduces the same mask bit-exactly."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0,1), got {rate}")
    g = x.graph
    xv = x.data
    if mode == "infer" or rate == 0.0:
        return g._record("dropout", (x.nid,), xv.copy(), {"rate": rate, "mode": mode},
                         lambda gr: (gr,))
    rng = np.random.default_rng(seed)
    keep = (rng.random(xv.shape) >= rate)
    scale = keep.astype(xv.dtype) / xv.dtype.type(1.0 - rate)
    return g._record("dropout", (x.nid,), xv * scale,
                     {"rate": rate, "mode": mode, "seed": seed},
                     lambda gr: (gr * scale,))


# ---------------------------------------------------------------------------
# dense / batchnorm
# ---------------------------------------------------------------------------

def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map: [N,D] @ [D,M] + [M]."""
    g = _same_graph(x, weight, bias)
    xv, wv, bv = x.data, weight.data, bias.data
    if xv.ndim != 2 or wv.ndim != 2:
        raise ValueError(f"dense: expected 2-d input/weight, got {xv.shape} and {wv.shape}")
    if xv.shape[1] != wv.shape[0]:
        raise ValueError(f"dense: inner dimension mismatch, input D={xv.shape[1]} vs weight D={wv.shape[0]}")
    if bv.shape != (wv.shape[1],):
        raise ValueError(f"dense: bias shape {bv.shape} != ({wv.shape[1]},)")
    out = xv @ wv + bv

    def vjp(gr):
        return gr @ wv.T, xv.T @ gr, gr.sum(axis=0)

    return g._record("dense", (x.nid, weight.nid, bias.nid), out, {}, vjp)


def batchnorm(x: Tensor, gamma: Tensor, beta: Tensor,
              running_mean: np.ndarray, running_var: np.ndarray,
              mode: str = "train", eps: float = 1e-5,
              momentum: float = 0.9) -> Tensor:
    """Per-channel batch normalization over [N,C,H,W].

    Train mode normalizes by the batch statistics (biased variance) and
    updates ``running_mean``/``running_var`` in place by EMA with the given
    momentum (keep-fraction convention).  Infer mode uses the running stats.
    """
    g = _same_graph(x, gamma, beta)
    xv = x.data
    if xv.ndim != 4:
        raise ValueError(f"batchnorm: expected [N,C,H,W], got shape {xv.shape}")
    n, c, h, w = xv.shape
    if gamma.shape != (c,) or beta.shape != (c,):
        raise ValueError(f"batchnorm: gamma/beta must have shape ({c},)")
    axes = (0, 2, 3)
    inputs = (x.nid, gamma.nid, beta.nid)
    gv, bv = gamma.data, beta.data

    if mode == "train":
        m = n * h * w
        if m < 2:
            raise ValueError("batchnorm: train mode needs N*H*W >= 2 (variance undefined)")
        mu = xv.mean(axis=axes)
        var = xv.var(axis=axes)
        running_mean[...] = momentum * running_mean + (1.0 - momentum) * mu
        running_var[...] = momentum * running_var + (1.0 - momentum) * var
        inv = 1.0 / np.sqrt(var + eps)
        xhat = (xv - mu[None, :, None, None]) * inv[None, :, None, None]
        out = gv[None, :, None, None] * xhat + bv[None, :, None, None]

        def vjp(gr):
            dbeta = gr.sum(axis=axes)
            dgamma = (gr * xhat).sum(axis=axes)
            dxhat = gr * gv[None, :, None, None]
            t1 = dxhat.mean(axis=axes, keepdims=True)
            t2 = (dxhat * xhat).mean(axis=axes, keepdims=True)
            dx = (dxhat - t1 - xhat * t2) * inv[None, :, None, None]
            return dx, dgamma, dbeta

        return g._record("batchnorm", inputs, out, {"mode": mode, "eps": eps}, vjp)

    inv = 1.0 / np.sqrt(running_var + eps)
    xhat = (xv - running_mean[None, :, None, None]) * inv[None, :, None, None]
    out = gv[None, :, None, None] * xhat + bv[None, :, None, None]

    def vjp(gr):
        dbeta = gr.sum(axis=axes)
        dgamma = (gr * xhat).sum(axis=axes)
        dx = gr * (gv * inv)[None, :, None, None]
        return dx, dgamma, dbeta

    return g._record("batchnorm", inputs, out, {"mode": mode, "eps": eps}, vjp)


# ---------------------------------------------------------------------------
# convolution kernels (shared by conv2d / conv2d_transpose / their gradients)
# ---------------------------------------------------------------------------

def _conv_out_size(size, k, stride, pad):
    return (size + 2 * pad - k) // stride + 1


def _im2col(x, kh, kw, stride, pad):
    n, c, h, w = x.shape
    ho = _conv_out_size(h, kh, stride, pad)
    wo = _conv_out_size(w, kw, stride, pad)
    if pad:
        x = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    win = np.lib.stride_tricks.sliding_window_view(x, (kh, kw), axis=(2, 3))
    win = win[:, :, ::stride, ::stride]
    # (n, c, ho, wo, kh, kw) -> (n, ho*wo, c*kh*kw)
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(n, ho * wo, c * kh * kw)
    return np.ascontiguousarray(cols), ho, wo


def _col2im(cols, x_shape, kh, kw, stride, pad, ho, wo):
    """Scatter-add of im2col columns back onto the (padded) input grid."""
    n, c, h, w = x_shape
    hp, wp = h + 2 * pad, w + 2 * pad
    out = np.zeros((n, c, hp, wp), dtype=cols.dtype)
    cols = cols.reshape(n, ho, wo, c, kh, kw).transpose(0, 3, 1, 2, 4, 5)
    for u in range(kh):
        hs = slice(u, u + (ho - 1) * stride + 1, stride)
        for v in range(kw):
            ws = slice(v, v + (wo - 1) * stride + 1, stride)
            out[:, :, hs, ws] += cols[:, :, :, :, u, v]
    if pad:
        out = out[:, :, pad:pad + h, pad:pad + w]
    return out


def _conv_fwd(x, wmat, kh, kw, stride, pad):
    n = x.shape[0]
    f = wmat.shape[0]
    cols, ho, wo = _im2col(x, kh, kw, stride, pad)
    out = np.matmul(cols, wmat.T)  # (n, ho*wo, f)
    return out.transpose(0, 2, 1).reshape(n, f, ho, wo)


def _conv_dx(grad, wmat, x_shape, kh, kw, stride, pad):
    n, f, ho, wo = grad.shape
    gcols = np.matmul(grad.reshape(n, f, ho * wo).transpose(0, 2, 1), wmat)
    return _col2im(gcols, x_shape, kh, kw, stride, pad, ho, wo)


def _conv_dw(x, grad, kh, kw, stride, pad):
    n, f, ho, wo = grad.shape
    cols, _, _ = _im2col(x, kh, kw, stride, pad)
    gmat = grad.reshape(n, f, ho * wo)
    # sum over batch and spatial positions
    return np.tensordot(gmat, cols, axes=([0, 2], [0, 1]))  # (f, c*kh*kw)


def conv2d(x: Tensor, kernel: Tensor, bias: Tensor,
           stride: int = 1, padding: int = 0) -> Tensor:
    """2-d cross-correlation: [N,C,H,W] * [F,C,kH,kW] -> [N,F,H',W'].

    H' = floor((H + 2*padding - kH)/stride) + 1, likewise W'.  No kernel
    flip (deep-learning convention).  Differentiable in x, kernel, bias.
    """
    g = _same_graph(x, kernel, bias)
    xv, kv, bv = x.data, kernel.data, bias.data
    if xv.ndim != 4 or kv.ndim != 4:
        raise ValueError(f"conv2d: expected 4-d input/kernel, got {xv.shape} and {kv.shape}")
    n, c, h, w = xv.shape
    f, ck, kh, kw = kv.shape
    if ck != c:
        raise ValueError(f"conv2d: input channels C={c} != kernel channels C={ck}")
    if bv.shape != (f,):
        raise ValueError(f"conv2d: bias shape {bv.shape} != ({f},)")
    if stride < 1:
        raise ValueError(f"conv2d: stride must be >= 1, got {stride}")
    if padding < 0:
        raise ValueError(f"conv2d: padding must be >= 0, got {padding}")
    if kh > h + 2 * padding or kw > w + 2 * padding:
        raise ValueError(
            f"conv2d: kernel {kh}x{kw} larger than padded input "
            f"{h + 2 * padding}x{w + 2 * padding}")
    wmat = kv.reshape(f, c * kh * kw)
    out = _conv_fwd(xv, wmat, kh, kw, stride, padding) + bv[None, :, None, None]

    def vjp(gr):
        dx = _conv_dx(gr, wmat, xv.shape, kh, kw, stride, padding)
        dw = _conv_dw(xv, gr, kh, kw, stride, padding).reshape(kv.shape)
        db = gr.sum(axis=(0, 2, 3))
        return dx, dw, db

    return g._record("conv2d", (x.nid, kernel.nid, bias.nid), out,
                     {"stride": stride, "padding": padding}, vjp)


def conv2d_transpose(x: Tensor, kernel: Tensor, bias: Tensor,
                     stride: int = 1, padding: int = 0,
                     output_padding: int = 0) -> Tensor:
    """Transposed 2-d convolution: [N,C,H,W] * [C,F,kH,kW] -> [N,F,H',W'].

    H' = (H-1)*stride - 2*padding + kH + output_padding.  The forward pass is
    the adjoint of ``conv2d`` with the same stride/padding, so the gradient
    w.r.t. the input is a plain conv2d forward with the same kernel.
    ``output_padding`` (< stride) grows the bottom/right edge so stride-2
    stacks can restore even sizes exactly; the default 0 keeps the classic
    shape formula.
    """
    g = _same_graph(x, kernel, bias)
    xv, kv, bv = x.data, kernel.data, bias.data
    if xv.ndim != 4 or kv.ndim != 4:
        raise ValueError(f"conv2d_transpose: expected 4-d input/kernel, got {xv.shape} and {kv.shape}")
    n, c, h, w = xv.shape
    ck, f, kh, kw = kv.shape
    if ck != c:
        raise ValueError(f"conv2d_transpose: input channels C={c} != kernel channels C={ck}")
    if bv.shape != (f,):
        raise ValueError(f"conv2d_transpose: bias shape {bv.shape} != ({f},)")
    if stride < 1:
        raise ValueError(f"conv2d_transpose: stride must be >= 1, got {stride}")
    if not 0 <= output_padding < stride:
        raise ValueError(f"conv2d_transpose: output_padding must be in [0, stride), got {output_padding}")
    hc = (h - 1) * stride - 2 * padding + kh + output_padding
    wc = (w - 1) * stride - 2 * padding + kw + output_padding
    if hc < 1 or wc < 1:
        raise ValueError(f"conv2d_transpose: output size {hc}x{wc} is empty "
                         f"(padding too large for kernel {kh}x{kw})")
    # the op is conv2d's input-gradient with the kernel read as (F_conv=C, C_conv=F)
    wmat = kv.reshape(c, f * kh * kw)
    canvas = (n, f, hc, wc)
    out = _conv_dx(xv, wmat, canvas, kh, kw, stride, padding) + bv[None, :, None, None]

    def vjp(gr):
        dx = _conv_fwd(gr, wmat, kh, kw, stride, padding)
        dw = _conv_dw(gr, xv, kh, kw, stride, padding).reshape(kv.shape)
        db = gr.sum(axis=(0, 2, 3))
        return dx, dw, db

    return g._record("conv2d_transpose", (x.nid, kernel.nid, bias.nid), out,
                     {"stride": stride, "padding": padding,
                      "output_padding": output_padding}, vjp)


def upsample_nearest(x: Tensor, factor: int) -> Tensor:
    """Replicate each pixel of [N,C,H,W] into a factor x factor block."""
    if factor < 1:
        raise ValueError(f"upsample_nearest: factor must be >= 1, got {factor}")
    g = x.graph
    xv = x.data
    if xv.ndim != 4:
        raise ValueError(f"upsample_nearest: expected [N,C,H,W], got shape {xv.shape}")
    n, c, h, w = xv.shape
    out = np.repeat(np.repeat(xv, factor, axis=2), factor, axis=3)

    def vjp(gr):
        return (gr.reshape(n, c, h, factor, w, factor).sum(axis=(3, 5)),)

    return g._record("upsample_nearest", (x.nid,), out, {"factor": factor}, vjp)


# ---------------------------------------------------------------------------
# backward pass and the finite-difference harness
# ---------------------------------------------------------------------------

def backward(graph: Graph, loss: Tensor) -> dict[int, np.ndarray]:
    """Accumulate gradients of a scalar loss w.r.t. every reachable node.

    Returns the node-id -> gradient map (also stored on ``graph.gradients``).
    Unreached nodes get no entry.
    """
    node = graph.nodes[loss.nid]
    if node.value.size != 1:
        raise ValueError(f"backward: loss must be scalar, got shape {node.value.shape}")
    grads: dict[int, np.ndarray] = {loss.nid: np.ones_like(node.value)}
    for nd in reversed(graph.nodes[: loss.nid + 1]):
        gr = grads.get(nd.nid)
        if gr is None or nd.vjp is None:
            continue
        for in_id, contrib in zip(nd.inputs, nd.vjp(gr)):
            contrib = np.asarray(contrib, dtype=graph.dtype)
            if in_id in grads:
                grads[in_id] = grads[in_id] + contrib
            else:
                grads[in_id] = contrib
    graph.gradients = grads
    return grads


def grad_check(op, inputs, eps: float = 1e-3, seed: int = 0) -> float:
    """Compare tape gradients of ``op`` against central finite differences.

    ``op`` takes Tensors and returns one Tensor; ``inputs`` are ndarrays, all
    treated as differentiable.  The check projects the output onto a fixed
    random direction and differentiates that scalar.  Finite differences run
    on a float64 graph so the quotient is not drowned by float32 rounding.
    Returns the max relative error, with denominator max(|a|, |b|, 1e-8).
    """
    if not 1e-5 <= eps <= 1e-2:
        raise ValueError(f"grad_check: eps must be in [1e-5, 1e-2], got {eps}")
    # salted so the projection never aliases caller data drawn from the same seed
    rng = np.random.default_rng([seed, 0x5EED])

    g = Graph()
    ts = [g.leaf(np.asarray(a, dtype=np.float32)) for a in inputs]
    out = op(*ts)
    w = rng.standard_normal(out.shape).astype(np.float32)
    loss = (out * g.leaf(w)).sum()
    grads = backward(g, loss)

    w64 = w.astype(np.float64)

    def scalar(arrs):
        gg = Graph(dtype=np.float64)
        o = op(*[gg.leaf(a) for a in arrs])
        return float(np.sum(o.data * w64))

    work = [np.array(a, dtype=np.float64) for a in inputs]
    max_err = 0.0
    for ti, arr in enumerate(work):
        tape = grads.get(ts[ti].nid)
        if tape is None:
            tape = np.zeros_like(arr)
        flat = arr.reshape(-1)
        num = np.empty(flat.size)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            fp = scalar(work)
            flat[i] = orig - eps
            fm = scalar(work)
            flat[i] = orig
            num[i] = (fp - fm) / (2.0 * eps)
        num = num.reshape(arr.shape)
        denom = np.maximum(np.maximum(np.abs(num), np.abs(tape)), 1e-8)
        max_err = max(max_err, float(np.max(np.abs(num - tape) / denom)))
    return max_err


def assert_all_finite(arrays, context: str) -> None:
    """Raise NonFiniteError naming ``context`` if any array has NaN/Inf.

    ``arrays`` may be an ndarray or a mapping name -> ndarray.
    """
    if isinstance(arrays, np.ndarray):
        arrays = {"value": arrays}
    for name, arr in arrays.items():
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"non-finite values in {name} ({context})")
