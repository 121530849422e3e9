"""Figure rendering for the CLI report path.

Each report-writing subcommand drops a PNG next to its delimited output:
estimated distributions as error-bar plots with any closed-form reference
overlaid.  Figures are a convenience view; the CSV/JSON file is the
authoritative record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def save_distribution(png_path, labels, proportions, stderrs=None, reference=None,
                      ref_name=None, title="", ylabel="proportion"):
    fig, ax = plt.subplots(figsize=(7, 4.2))
    xs = range(len(labels))
    if stderrs is not None:
        ax.errorbar(xs, proportions, yerr=[2 * s for s in stderrs], fmt="o", ms=4,
                    capsize=3, label="estimate (±2 se)")
    else:
        ax.plot(xs, proportions, "o-", ms=4, label="value")
    if reference is not None:
        ax.plot(xs, reference, "x--", color="tab:red", ms=7, label=ref_name or "reference")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(l) for l in labels], fontsize=8)
    ax.set_xlabel("label")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path


def save_compare(png_path, q_labels, q_est, q_ref, p_labels, p_est, p_ref, title=""):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.2))
    ax1.plot(q_labels, q_est, "o", label="estimated degree law")
    ax1.plot(q_labels, q_ref, "x--", color="tab:red", label="Poisson(1) weights")
    ax1.set_xlabel("neighbor degree i")
    ax1.set_ylabel("probability")
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    ax2.plot(p_labels, p_est, "o", label="height law from degree law")
    ax2.plot(p_labels, p_ref, "x--", color="tab:red", label="asymptotic formula")
    ax2.set_xlabel("height i")
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path


def save_sweep(png_path, labels, series, title=""):
    """One line per kill radius; series maps name -> (proportions, stderrs)."""
    fig, ax = plt.subplots(figsize=(7, 4.2))
    for name, (props, errs) in series.items():
        ax.errorbar(labels, props, yerr=[2 * s for s in errs], ms=4, fmt="o-",
                    capsize=3, label=name)
    ax.set_xlabel("neighbor degree i")
    ax.set_ylabel("probability")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return png_path
