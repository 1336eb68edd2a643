import numpy as np

from rankbreak.rankbreak import RankBreak
from rankbreak.simulate.generators import Ar1Config, FgnConfig, gen_ar1_changepoint, gen_fgn
from rankbreak.testing.procedures.cusum import test_cusum
from rankbreak.testing.procedures.wilcoxon import test_wilcoxon
from rankbreak.tables import GridOptions

if __name__ == "__main__":

    rng = np.random.default_rng(2024)

    # A short-memory series with one mean shift, then a long-memory series
    shifted = gen_ar1_changepoint(Ar1Config(n=1000, rho=0.4, theta=0.5, delta=1.0), rng)
    long_memory = gen_fgn(FgnConfig(n=1000, d=0.4), rng)

    for label, series in (("AR(1) + shift", shifted), ("fGn d=0.4", long_memory)):
        for report in (test_wilcoxon(series), test_cusum(series)):
            print(f"{label:>14} {report.procedure.value:>8}: k_hat={report.k_hat:4d} "
                  f"statistic={report.statistic:.3f} reject={report.reject}")

    # Create an instance of the table runner and reproduce Table 2 at a small scale
    app = RankBreak(workers=2)
    app.run(['2'], GridOptions(replications=200, max_n=500), out_dir='tables',
            manifest={'command': 'sample', 'seed': 0})
