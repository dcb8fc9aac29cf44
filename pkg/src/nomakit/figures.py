"""Matplotlib renderings of the curve tables produced by the CLI."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

# Keeps PNG output byte-stable across runs.
_SAVE_KW = {"dpi": 150, "metadata": {"Software": None}}


def _finish(fig, ax, path, xlabel, ylabel):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def rate_region(rows, path):
    boundary = [r for r in rows if r["point"] == "boundary"]
    marks = [r for r in rows if r["point"] == "solution"]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.plot([r["R1"] for r in boundary], [r["R2"] for r in boundary], "-", label="boundary")
    ax.fill_between([r["R1"] for r in boundary], [r["R2"] for r in boundary], alpha=0.15)
    if marks:
        ax.plot([r["R1"] for r in marks], [r["R2"] for r in marks], "o", mfc="none", ms=9, label="min-power solution")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    _finish(fig, ax, path, "$R_1$ (bits/channel use)", "$R_2$ (bits/channel use)")


def power_vs_antennas(rows, path):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ls = [r["L"] for r in rows]
    ax.semilogy(ls, [r["noma_mean_power"] for r in rows], "o-", label="NOMA")
    ax.semilogy(ls, [r["oma_mean_power"] for r in rows], "s--", label="OMA")
    _finish(fig, ax, path, "number of antennas $L$", "total transmit power")


def aloha_curves(rows, path):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    p = [r["p_a"] for r in rows]
    ax.plot(p, [r["aloha_T"] for r in rows], "-", label="ALOHA")
    ax.plot(p, [r["noma_T"] for r in rows], "--", label="NOMA-ALOHA, 2 levels")
    _finish(fig, ax, path, "access probability $p_a$", "throughput")


def multichannel_curves(rows, path):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for model in dict.fromkeys(r["model"] for r in rows):
        sel = [r for r in rows if r["model"] == model]
        p = [r["p_a"] for r in sel]
        ax.errorbar(p, [r["mean_T"] for r in sel], yerr=[r["stderr"] for r in sel], capsize=0, label=model)
    _finish(fig, ax, path, "access probability $p_a$", "throughput")


RENDERERS = {
    "fig1": rate_region,
    "fig3": power_vs_antennas,
    "fig4": aloha_curves,
    "fig6": multichannel_curves,
}
