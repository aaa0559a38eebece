# Which states carry genuine multi-particle correlation?
#
# The N-particle coefficient is the joint cumulant of Pauli observables. It
# vanishes whenever the particles split into independent groups, so a
# non-zero value over all particles points to correlation shared by all.

from teleportkit import bases
from teleportkit.correlations import corr3, cumulant_n, nonzero_scan, set_partitions

# Three-particle coefficients of the first chi state.

chi1 = bases.chi_basis()["chi.1"]
print("chi.1 =", chi1)
print(nonzero_scan(chi1, label="chi.1").to_csv())

# A Bell pair next to a |+> qubit looks similar at the amplitude level but
# has no three-particle coefficient at all.

eq5 = bases.catalog_state("eq5")
scan = nonzero_scan(eq5, keep_zeros=True)
print("largest of 27 coefficients for the product state:",
      max(abs(r.value) for r in scan.rows))

# The closed forms for 2, 3 and 4 particles are special cases of a sum over
# set partitions. For three particles there are five partitions.

for p in set_partitions(3):
    print(p)
spec = ((1, 2, 3), "xxz")
print(f"closed form {corr3(chi1, spec):.12f}, partition sum {cumulant_n(chi1, spec):.12f}")

# Every member of the four-particle sets has exactly four maximal entries.

for name in ("eq21", "eq25", "eq31"):
    fam = bases.four_particle_set(name)
    sig = nonzero_scan(fam[1]).nonzero()
    print(name, fam.labels[0], {k: round(v, 9) for k, v in sig.items()})
