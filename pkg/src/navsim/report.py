"""CSV and figure output for runs and comparisons.

CSV files use a fixed schema, 17-significant-digit decimal formatting and LF
line endings, so identical runs produce byte-identical files.  Figures are
rendered with matplotlib to SVG next to the delimited output.
"""

import numpy as np

ERROR_CSV_HEADER = (
    "t_s,verr_n_mps,verr_u_mps,verr_e_mps,perr_n_m,perr_u_m,perr_e_m,perr_horiz_m"
)
COMPARE_CSV_HEADER = (
    "rank,algorithm,max_horiz_vel_err_mps,final_horiz_vel_err_mps,"
    "max_horiz_pos_err_m,final_horiz_pos_err_m"
)

# Log-scale plots cannot show exact zeros; errors at machine zero are shown
# at this floor instead.
PLOT_FLOOR = 1e-20


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_error_csv(path, result) -> None:
    """Write the per-epoch error series of one run."""
    rows = [ERROR_CSV_HEADER]
    t = result.t
    v = result.v_err
    p = result.p_err
    ph = result.p_err_horiz
    for i in range(len(t)):
        rows.append(
            ",".join(
                (
                    _fmt(t[i]),
                    _fmt(v[i, 0]),
                    _fmt(v[i, 1]),
                    _fmt(v[i, 2]),
                    _fmt(p[i, 0]),
                    _fmt(p[i, 1]),
                    _fmt(p[i, 2]),
                    _fmt(ph[i]),
                )
            )
        )
    rows.append("")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(rows))


def write_compare_csv(path, table) -> None:
    """Write the ranking table produced by ``navigator.compare``."""
    rows = [COMPARE_CSV_HEADER]
    for row in table:
        rows.append(
            ",".join(
                (
                    str(row.rank),
                    row.algorithm,
                    _fmt(row.max_horiz_vel_err),
                    _fmt(row.final_horiz_vel_err),
                    _fmt(row.max_horiz_pos_err),
                    _fmt(row.final_horiz_pos_err),
                )
            )
        )
    rows.append("")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(rows))


def _horiz_vel_err(result):
    return np.hypot(result.v_err[:, 0], result.v_err[:, 2])


def plot_run(path, result) -> None:
    """Velocity and position error of a single run, saved as a figure."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax_v, ax_p) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    label = f"{result.vel_alg.value}/{result.pos_alg.value}"
    ax_v.semilogy(result.t, np.maximum(_horiz_vel_err(result), PLOT_FLOOR), lw=0.8)
    ax_v.set_ylabel("horizontal velocity error (m/s)")
    ax_v.set_title(f"algorithm {label}")
    ax_p.semilogy(result.t, np.maximum(result.p_err_horiz, PLOT_FLOOR), lw=0.8)
    ax_p.set_ylabel("horizontal position error (m)")
    ax_p.set_xlabel("time (s)")
    for ax in (ax_v, ax_p):
        ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_compare(path, results) -> None:
    """Horizontal position error of several runs on one set of axes."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for result in results:
        ax.semilogy(
            result.t,
            np.maximum(result.p_err_horiz, PLOT_FLOOR),
            lw=0.8,
            label=result.vel_alg.value,
        )
    ax.set_xlabel("time (s)")
    ax.set_ylabel("horizontal position error (m)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
