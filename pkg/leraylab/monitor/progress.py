import os
import sys
import plotly.graph_objs as go
from plotly.offline import plot as plotly_plot

import leraylab.logo


class Progress():
    """
    Print one row of metrics per logged iteration and optionally plot the history as plotly graph
    """

    def __init__(self, plotfile=None, title=""):

        self.optimization_log = {}
        self.iterations = []
        self.plotfile = plotfile
        self.title = title
        self.rows = 0

    def print_header(self):

        headerline = "{0:>{1}s}".format('iter', 8)
        headerline += "".join("{0:>{1}s}".format(ht, 15) for ht in sorted(self.optimization_log.keys()))

        if leraylab.logo.is_tty:
            print("\x1b[2;37m{0}\x1b[0m".format(headerline))
        else:
            print(headerline)

    def set_plot_title(self, title):
        self.title = title

    def set_plot_file(self, file):
        self.plotfile = file

    def init_log(self, **kwargs):
        for name in kwargs.keys():
            self.optimization_log[name] = []

        self.print_header()

    def log_progress(self, n_iter, **kwargs):

        if len(self.optimization_log) == 0:
            self.init_log(**kwargs)
        elif self.rows != 0 and self.rows % 100 == 0:
            self.print_header()

        self.iterations.append(n_iter)
        self.rows += 1

        log = "{0:>{1}}".format(n_iter, '8g')
        for name, metric in sorted(kwargs.items()):
            self.optimization_log.setdefault(name, []).append(metric)
            log += "{0:>{1}}".format(metric, '15g')
        print(log)

        if self.plotfile is not None:
            self.plot_progress()

        sys.stdout.flush()

    def plot_progress(self):

        if self.plotfile is None:
            return

        name = os.path.basename(self.plotfile).split(".")[0]
        title = "Residual log for {0} ".format(name) + self.title

        data = []
        for metric, values in sorted(self.optimization_log.items()):
            data.append(
                go.Scatter(
                    x=self.iterations[-len(values):],
                    y=values,
                    mode='lines',
                    name=metric
                )
            )

        plot = {
            "data": data,
            "layout": go.Layout(
                title=title,
                xaxis=dict(title="iteration / step", exponentformat="e", showexponent='all'),
                yaxis=dict(title="metric", type="log", exponentformat="e", showexponent='all'),
                font=dict(size=18)
            )
        }

        plotly_plot(plot, filename=self.plotfile, auto_open=False)
