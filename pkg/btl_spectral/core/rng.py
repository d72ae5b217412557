"""
RNG - Flux aléatoires reproductibles

Algorithme:
-----------
Chaque flux est un générateur numpy Philox4x64 (générateur à compteur).
Sa clé 128 bits est dérivée par SeedSequence(seed, spawn_key=(flux, ...)),
ce qui rend les tirages indépendants de la plateforme et de l'ordre des appels.

Flux utilisés:
- 'graph'       : uniformes U_ij des arêtes (un seul flux, position j(j-1)/2 + i)
- 'comparisons' : un flux par paire (i, j)
- 'model'       : scores log-uniformes
"""

from typing import Tuple

import numpy as np

STREAMS = {
    'graph': 1,
    'comparisons': 2,
    'model': 3,
}

_SEED_MASK = (1 << 64) - 1


def stream_generator(seed: int, stream: str, *keys: int) -> np.random.Generator:
    """
    Crée un générateur Philox pour un flux et une graine donnés.

    Args:
        seed: Graine 64 bits
        stream: Nom du flux (voir STREAMS)
        *keys: Indices supplémentaires (ex: i, j pour une paire)

    Returns:
        np.random.Generator déterministe
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & _SEED_MASK,
        spawn_key=(STREAMS[stream],) + tuple(int(k) for k in keys),
    )
    key = sequence.generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def pair_index(i: int, j: int) -> int:
    """Position de la paire (i, j), i < j, dans l'ordre colexicographique."""
    return j * (j - 1) // 2 + i


def pair_uniforms(seed: int, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Uniformes U_ij pour toutes les paires i < j d'un graphe à n sommets.

    U_ij ne dépend que de (seed, i, j): le graphe sur n sommets est un
    préfixe du graphe sur n + 1 sommets.

    Returns:
        (rows, cols, u) avec rows < cols, dans l'ordre colexicographique
    """
    count = n * (n - 1) // 2
    u = stream_generator(seed, 'graph').random(count)
    cols = np.repeat(np.arange(n), np.arange(n))
    rows = np.concatenate([np.arange(j) for j in range(n)]) if n > 1 else np.zeros(0, dtype=int)
    return rows.astype(np.int64), cols.astype(np.int64), u
