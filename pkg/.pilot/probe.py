import numpy as np, time, json, sys
from annealkit.fermion import ChainSpec, bdg_matrices, ground_state, evolve, correlations, residual_energy
from annealkit.noise import NoiseSpectrum, sample_signal

def run_point(L, v, lam, n_real, Nm=100, rtol=1e-5, single=False):
    T = 1.0/v
    es = []
    for r in range(n_real):
        if lam > 0:
            if single:
                sigs = [None]*L
                sigs[0] = sample_signal(NoiseSpectrum(n_modes=Nm), (99, L, float(v), r, 0))
            else:
                sigs = [sample_signal(NoiseSpectrum(n_modes=Nm), (99, L, float(v), r, i)) for i in range(L)]
            ch = ChainSpec(size=L, coupling=lam, signals=tuple(sigs))
        else:
            ch = ChainSpec(size=L)
        m = ground_state(*bdg_matrices(ch, 0.0, 0.0))
        mf = evolve(m, ch, T, rtol=rtol, atol=1e-9)
        es.append(residual_energy(correlations(mf)))
        if lam == 0: break
    return float(np.mean(es)), float(np.std(es)/np.sqrt(len(es)) if len(es)>1 else 0.0)

out = []
def rec(tag, L, v, e, se, dt):
    row = dict(tag=tag, L=L, v=v, dE=e, se=se, secs=round(dt,1))
    out.append(row)
    print(json.dumps(row), flush=True)

# all-sites minima location for L=64, 128
for L, vs, n in [(64, [3e-3, 1.5e-3, 8e-4, 4e-4], 4),
                 (128, [3e-3, 1.5e-3, 8e-4], 3)]:
    for v in vs:
        t0=time.perf_counter(); e,se = run_point(L, v, 0.01, n); rec("all", L, v, e, se, time.perf_counter()-t0)

# single-site minima location for L=32, 64
for L, vs, n in [(32, [1e-3, 3e-4, 1e-4], 4), (64, [1e-3, 3e-4, 1e-4], 4)]:
    for v in vs:
        t0=time.perf_counter(); e,se = run_point(L, v, 0.01, n, single=True); rec("single", L, v, e, se, time.perf_counter()-t0)

json.dump(out, open("/root/pkg/.pilot/probe_results.json","w"), indent=1)
print("DONE")
