"""
Configuration de btl_spectral - Tolérances numériques et valeurs par défaut

Ce fichier regroupe les constantes utilisées par les solveurs et le harnais
d'expériences. Modifiez les valeurs selon vos besoins.
"""

# ==================== CHAÎNES DE MARKOV ====================

POWER_TOL = 1e-10                # Résidu l1 maximal de v^T S - v^T
POWER_MAX_ITERS = 1_000_000      # Itérations maximales de la méthode de la puissance
EXACT_MAX_N = 512                # Taille maximale pour le solveur dense exact
ROW_SUM_ATOL = 1e-10             # Tolérance sur la somme des lignes de S

# ==================== ÉCHANTILLONNAGE ====================

BERNOULLI_MAX_K = 10_000         # Au-delà: tirage binomial exact plutôt que k Bernoulli
DENSE_MAX_N = 2048               # Taille maximale d'un graphe stocké en dense

# ==================== REPONDÉRATION (MMWU) ====================

MMWU_ITERATIONS = 200            # Itérations externes
MMWU_STEP_SCALE = 0.5            # step_size = MMWU_STEP_SCALE / sqrt(iterations)
MMWU_DEGREE_FLOOR = 1.0          # Degré pondéré minimal exigé
MMWU_MIN_WEIGHT = 1e-6           # Poids plancher sur l'arbre couvrant si le graphe se déconnecte
CAP_ESTIMATOR = "mean_degree"    # "mean_degree" ou "lower_quartile_degree"

# ==================== SPECTRES ====================

EIG_ZERO_ATOL = 1e-10            # Seuil sous lequel une valeur propre est considérée nulle

# ==================== EXPÉRIENCES ====================

DEFAULT_K = 32                   # Comparaisons par paire observée
DEFAULT_TRIALS = 25              # Répétitions par taille (médiane)
DEFAULT_SCORE_RANGE = 4.0        # h des scores log-uniformes
DEFAULT_BASE_SEED = 20240601     # Graine de base des presets
EXPERIMENT_N_GRID = [30, 45, 60, 75, 90, 105, 120, 135]

# ==================== SORTIES ====================

CSV_DIGITS = 12                  # Chiffres significatifs dans les CSV
