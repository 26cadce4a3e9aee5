#!/usr/bin/env python3
"""Builds the committed test fixtures under tests/data.

Trains small fully connected networks whose forward pass is the integer
fixed-point semantics itself (straight-through gradients for rounding and
clamping), exports them in the model JSON format, and writes layer-by-layer
traces computed by a plain-Python integer evaluator.  Also writes a held-out
IDX subset and a few QDIMACS formulas.

Requires torch and mlxtend (for its bundled 5000-sample MNIST subset).
"""

import argparse
import hashlib
import json
import random
import struct
from pathlib import Path

import numpy as np
import torch
from mlxtend.data import mnist_data

SEED = 20240611
HOLDOUT = 500
IDX_SUBSET = 200


# ---------------------------------------------------------------------------
# data


def load_mnist(seed):
    x, y = mnist_data()
    x = x.astype(np.uint8)
    y = y.astype(np.int64)
    order = np.random.RandomState(seed).permutation(len(y))
    x, y = x[order], y[order]
    return (x[HOLDOUT:], y[HOLDOUT:]), (x[:HOLDOUT], y[:HOLDOUT])


def quantize(pixels, k_in):
    return pixels >> (8 - k_in)


def write_idx(images_path, labels_path, x, y):
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(y), 28, 28))
        f.write(x.astype(np.uint8).tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(y)))
        f.write(y.astype(np.uint8).tobytes())


# ---------------------------------------------------------------------------
# training


class Floor(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        return torch.floor(x)

    @staticmethod
    def backward(ctx, g):
        return g


class Round(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        return torch.round(x)

    @staticmethod
    def backward(ctx, g):
        return g


class FixedPointMLP(torch.nn.Module):
    def __init__(self, sizes, weight_bits, act_bits, out_bits):
        super().__init__()
        self.linears = torch.nn.ModuleList(
            torch.nn.Linear(a, b) for a, b in zip(sizes[:-1], sizes[1:])
        )
        self.weight_bits = weight_bits
        self.clamp = [act_bits] * (len(sizes) - 2) + [out_bits]
        self.wfrac = [0] * len(self.linears)
        self.afrac = [0] * len(sizes)
        self.quantized = False

    def calibrate(self, x, in_frac):
        """Picks power-of-two scales from float statistics."""
        wmax = 2 ** self.weight_bits - 1
        self.afrac[0] = in_frac
        h = x * 2.0 ** -in_frac
        for i, lin in enumerate(self.linears):
            m = lin.weight.detach().abs().max().item()
            self.wfrac[i] = int(np.floor(np.log2(wmax / m)))
            h = torch.relu(lin(h))
            top = torch.quantile(h.flatten()[: 200000], 0.999).item()
            f = int(np.floor(np.log2((2 ** self.clamp[i] - 1) / max(top, 1e-6))))
            f = min(f, self.wfrac[i] + self.afrac[i])  # bit shifts stay non-negative
            self.afrac[i + 1] = f
        self.quantized = True

    def int_params(self, i):
        lin = self.linears[i]
        wmax = 2 ** self.weight_bits - 1
        w = torch.clamp(Round.apply(lin.weight * 2.0 ** self.wfrac[i]), -wmax, wmax)
        b = Round.apply(lin.bias * 2.0 ** (self.wfrac[i] + self.afrac[i]))
        k = self.wfrac[i] + self.afrac[i] - self.afrac[i + 1]
        return w, b, k

    def forward(self, x_int):
        if not self.quantized:
            h = x_int * 2.0 ** -self.afrac[0]
            for i, lin in enumerate(self.linears):
                h = lin(h)
                if i + 1 < len(self.linears):
                    h = torch.relu(h)
            return h
        h = x_int
        for i in range(len(self.linears)):
            w, b, k = self.int_params(i)
            acc = h @ w.t() + b
            h = Floor.apply(acc * 2.0 ** -k)
            h = torch.clamp(h, 0, 2 ** self.clamp[i] - 1)
        return h * 2.0 ** -self.afrac[-1]

    def export(self, k_in, meta):
        layers = []
        for i in range(len(self.linears)):
            w, b, k = self.int_params(i)
            n = w.shape[0]
            layers.append(
                {
                    "weights": [[int(v) for v in row] for row in w.detach().to(torch.int64).tolist()],
                    "bias": [int(v) for v in b.detach().to(torch.int64).tolist()],
                    "bit_shift": [int(k)] * n,
                    "clamp_bits": [int(self.clamp[i])] * n,
                }
            )
        return {
            "format_version": 1,
            "input_bits": k_in,
            "weight_bits": self.weight_bits,
            "metadata": meta,
            "layers": layers,
        }


def train(sizes, k_in, bits, out_bits, train_set, seed, float_epochs, qat_epochs):
    torch.manual_seed(seed)
    x, y = train_set
    xq = torch.tensor(quantize(x, k_in), dtype=torch.float32)
    yt = torch.tensor(y)
    model = FixedPointMLP(sizes, bits, bits, out_bits)
    model.afrac[0] = k_in
    opt = torch.optim.Adam(model.parameters(), lr=1e-3)
    gen = torch.Generator().manual_seed(seed)

    def epochs(n):
        for _ in range(n):
            perm = torch.randperm(len(yt), generator=gen)
            for s in range(0, len(yt), 64):
                idx = perm[s : s + 64]
                opt.zero_grad()
                loss = torch.nn.functional.cross_entropy(model(xq[idx]), yt[idx])
                loss.backward()
                opt.step()

    epochs(float_epochs)
    with torch.no_grad():
        model.calibrate(xq, k_in)
    for g in opt.param_groups:
        g["lr"] = 3e-4
    epochs(qat_epochs)
    return model


# ---------------------------------------------------------------------------
# reference evaluation, deliberately independent of the trainer


def floor_shift(v, k):
    return v >> k  # Python's >> floors for negative values


def relu_n(v, n):
    return max(0, min((1 << n) - 1, v))


def pre_shift(x, e, direction):
    return x << e if direction == "left" else x >> e


def eval_trace(model, x):
    layers = []
    a = list(x)
    for L in model["layers"]:
        es = L.get("edge_shift")
        direction = L.get("edge_shift_direction", "right")
        pre, post, out = [], [], []
        for i, row in enumerate(L["weights"]):
            acc = 0
            for j, w in enumerate(row):
                src = a[j] if es is None else pre_shift(a[j], es[i][j], direction)
                acc += w * src
            acc += L["bias"][i]
            r = floor_shift(acc, L["bit_shift"][i])
            pre.append(acc)
            post.append(r)
            out.append(relu_n(r, L["clamp_bits"][i]))
        layers.append({"pre_round": pre, "post_round": post, "output": out})
        a = out
    return layers


def argmax_low(v):
    best = 0
    for i in range(1, len(v)):
        if v[i] > v[best]:
            best = i
    return best


def accuracy(model, x, y):
    hits = 0
    for xi, yi in zip(x, y):
        out = eval_trace(model, [int(p) for p in quantize(xi, model["input_bits"])])[-1]["output"]
        hits += argmax_low(out) == yi
    return hits / len(y)


def make_traces(model, inputs):
    return [{"input": list(x), "layers": eval_trace(model, x)} for x in inputs]


def trace_inputs(model, holdout_x, rng, n_random, n_data):
    top = (1 << model["input_bits"]) - 1
    n_in = len(model["layers"][0]["weights"][0])
    out = [[0] * n_in, [top] * n_in]
    out += [[rng.randint(0, top) for _ in range(n_in)] for _ in range(n_random)]
    if holdout_x is not None:
        out += [[int(p) for p in quantize(holdout_x[i], model["input_bits"])] for i in range(n_data)]
    return out


# ---------------------------------------------------------------------------
# hand-made edge-case models


def edge_case_model(rng):
    """Tiny net with negative biases, mixed shifts/clamps and per-edge shifts."""
    return {
        "format_version": 1,
        "input_bits": 3,
        "weight_bits": 3,
        "metadata": {"origin": "random edge cases"},
        "layers": [
            {
                "weights": [[rng.randint(-3, 3) for _ in range(4)] for _ in range(5)],
                "bias": [-9, 7, 0, -1, 12],
                "bit_shift": [0, 1, 2, 3, 1],
                "clamp_bits": [3, 2, 4, 1, 3],
                "edge_shift": [[rng.randint(0, 2) for _ in range(4)] for _ in range(5)],
                "edge_shift_direction": "right",
            },
            {
                "weights": [[rng.randint(-3, 3) for _ in range(5)] for _ in range(3)],
                "bias": [-4, 3, 0],
                "bit_shift": [1, 0, 2],
                "clamp_bits": [4, 3, 5],
                "edge_shift": [[rng.randint(0, 1) for _ in range(5)] for _ in range(3)],
                "edge_shift_direction": "left",
            },
        ],
    }


# ---------------------------------------------------------------------------
# QDIMACS


def qdimacs_examples():
    return {
        "forall_exists_iff.qdimacs": "c forall x1 exists x2 . x1 <-> x2\np cnf 2 2\na 1 0\ne 2 0\n1 -2 0\n-1 2 0\n",
        "exists_contradiction.qdimacs": "p cnf 1 2\ne 1 0\n1 0\n-1 0\n",
        "forall_x.qdimacs": "p cnf 1 1\na 1 0\n1 0\n",
        "two_universals.qdimacs": "p cnf 4 4\na 1 0\ne 3 0\na 2 0\ne 4 0\n1 -3 0\n-1 3 0\n2 3 -4 0\n-2 4 0\n",
        "empty_matrix.qdimacs": "p cnf 2 0\na 1 0\ne 2 0\n",
    }


# ---------------------------------------------------------------------------


MODELS = [
    # name, sizes, k_in, bits, output clamp bits, float epochs, qat epochs
    ("mnist_784_16_10_w4", [784, 16, 10], 4, 4, 8, 8, 8),
    ("mnist_784_32_10_w5", [784, 32, 10], 5, 5, 8, 8, 8),
    ("mnist_784_64_32_10_w6", [784, 64, 32, 10], 6, 6, 8, 8, 8),
]


def dump(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    ap.add_argument("--traces", type=int, default=60)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)

    train_set, (hx, hy) = load_mnist(SEED)
    write_idx(out / "mnist-holdout-images.idx3", out / "mnist-holdout-labels.idx1", hx[:IDX_SUBSET], hy[:IDX_SUBSET])

    rng = random.Random(SEED)
    for name, sizes, k_in, bits, out_bits, fe, qe in MODELS:
        model = train(sizes, k_in, bits, out_bits, train_set, SEED, fe, qe)
        meta = {
            "architecture": "-".join(map(str, sizes)),
            "bits": str(bits),
            "seed": str(SEED),
            "epochs": f"{fe} float + {qe} fixed-point",
            "pixel_quantization": f"p >> {8 - k_in}",
            "training_samples": str(len(train_set[1])),
        }
        doc = model.export(k_in, meta)
        acc = accuracy(doc, hx, hy)
        doc["metadata"]["holdout_accuracy"] = f"{acc:.4f}"
        params = sum(len(L["weights"]) * (len(L["weights"][0]) + 1) for L in doc["layers"])
        print(f"{name}: {params} parameters, holdout accuracy {acc:.3f}")
        dump(out / f"{name}.json", doc)
        inputs = trace_inputs(doc, hx, rng, args.traces // 2, args.traces - args.traces // 2 - 2)
        dump(out / f"{name}.traces.json", {"model": f"{name}.json", "traces": make_traces(doc, inputs)})

    edge = edge_case_model(rng)
    dump(out / "edge_cases.json", edge)
    inputs = trace_inputs(edge, None, rng, args.traces, 0)
    dump(out / "edge_cases.traces.json", {"model": "edge_cases.json", "traces": make_traces(edge, inputs)})

    qdir = out / "qdimacs"
    qdir.mkdir(exist_ok=True)
    for fname, text in qdimacs_examples().items():
        (qdir / fname).write_text(text)

    for p in sorted(out.glob("*.json")):
        print(p.name, hashlib.sha256(p.read_bytes()).hexdigest()[:16])


if __name__ == "__main__":
    main()
