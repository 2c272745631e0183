"""
Global two-way ANOVA of relative liver weight
=============================================

Relative liver weight (100 * liver / body weight) of rats at six doses,
ten animals per sex and dose. The sequential ANOVA shows a strong sex
effect and a dose-by-sex interaction, which is what makes a pooled
analysis questionable and a per-sex analysis wasteful.
"""

from simulcomp import anova_two_way, cell_structure, embedded_liver_dataset

ds = embedded_liver_dataset()
print(f"{len(ds)} animals, doses {', '.join(ds.dose_levels)}, sexes {', '.join(ds.sex_levels)}")

# cell means per sex and dose
cs = cell_structure(ds)
for label, n, mean in zip(cs.labels, cs.counts, cs.means):
    print(f"  {label:<8} n={n:<3d} mean={mean:.3f}")

# Type I sums of squares, Dose entered first
table = anova_two_way(ds, order=("Dose", "Sex"))
print()
print(f"{'term':<10} {'Df':>4} {'Sum Sq':>8} {'F':>7} {'Pr(>F)':>9}")
for row in table:
    f = "" if row.f_value is None else f"{row.f_value:.2f}"
    p = "" if row.p_value is None else f"{row.p_value:.2e}"
    print(f"{row.term:<10} {row.df:>4d} {row.sum_sq:>8.2f} {f:>7} {p:>9}")
