import time
from annealkit.noise import NoiseSpectrum
from annealkit.qubit import QubitRun, coherence_time, evolve_qubit
spec = NoiseSpectrum(p=0.75, omega0=1.0, coupling=0.01, n_modes=1000)
for hz, tmax in ((0.0, 150.0), (0.1, 400.0), (0.2, 700.0)):
    t0 = time.perf_counter()
    run = QubitRun(h_z=hz, spectrum=spec, t_max=tmax, dt_out=0.5,
                   n_realizations=300, master_seed=42)
    curve = evolve_qubit(run)
    try:
        tr = coherence_time(curve)
        print(f"h_z={hz}: T_r ~= {tr:.1f}  ({time.perf_counter()-t0:.0f}s)", flush=True)
    except Exception as e:
        print(f"h_z={hz}: {e}  ({time.perf_counter()-t0:.0f}s)", flush=True)
