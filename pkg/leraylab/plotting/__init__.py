import numpy as np
import plotly.graph_objs as go
from plotly.offline import plot as plotly_plot


def plot_decay_fit(fit, plot_file=None, title=None):
    """Shell maxima, shell means and the fitted power law on log-log axes"""

    shells = fit.shells[fit.shells["count"] > 0]
    r = shells["r_argmax"].values

    data = []
    data.append(
        go.Scatter(
            x=r,
            y=shells["shell_max"].values,
            name="shell max",
            mode="markers",
            marker=dict(size=9)
        )
    )

    data.append(
        go.Scatter(
            x=shells["r"].values,
            y=shells["shell_mean"].values,
            name="shell mean",
            mode="markers",
            marker=dict(size=7, symbol="diamond")
        )
    )

    #fitted line anchored at the geometric mean of the shell maxima
    log_r = np.log(r)
    log_f = np.log(shells["shell_max"].values)
    line = np.exp(np.mean(log_f) - fit.exponent * (log_r - np.mean(log_r)))
    if fit.log_coefficient is not None:
        line = line * (np.log(r) / np.exp(np.mean(np.log(np.log(r))))) ** fit.log_coefficient
    data.append(
        go.Scatter(
            x=r,
            y=line,
            name="fit m={0:.3f}".format(fit.exponent),
            mode="lines",
            line=dict(width=3)
        )
    )

    if fit.expected is not None:
        data.append(
            go.Scatter(
                x=r,
                y=np.exp(np.mean(log_f) - fit.expected * (log_r - np.mean(log_r))),
                name="r^-{0:.3f}".format(fit.expected),
                mode="lines",
                line=dict(width=2, dash="dash")
            )
        )

    layout = {
        'title': title or "Radial decay ({0})".format(fit.model),
        'xaxis': {'title': "r", 'type': "log"},
        'yaxis': {'title': "|f|", 'type': "log", 'exponentformat': "e"},
        'font': {'size': 18}
    }

    plot = {'data': data, 'layout': layout}
    if plot_file is None:
        return plot
    else:
        plotly_plot(plot, filename=plot_file, auto_open=False)


def plot_residual_history(history, plot_file=None, title="Residual history"):
    """One line per metric of a residual history (list of dicts with a step column)"""

    steps = [row["step"] for row in history]
    metrics = sorted(set(k for row in history for k in row.keys()) - set(["step", "time"]))

    data = []
    for metric in metrics:
        data.append(
            go.Scatter(
                x=steps,
                y=[row.get(metric) for row in history],
                name=metric,
                mode="lines"
            )
        )

    layout = {
        'title': title,
        'xaxis': {'title': "iteration / step"},
        'yaxis': {'title': "value", 'type': "log", 'exponentformat': "e"},
        'font': {'size': 18}
    }

    plot = {'data': data, 'layout': layout}
    if plot_file is None:
        return plot
    else:
        plotly_plot(plot, filename=plot_file, auto_open=False)
