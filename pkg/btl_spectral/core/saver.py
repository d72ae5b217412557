"""
Saver - Écriture des résultats d'expériences

Tables CSV (UTF-8, fins de ligne LF), métadonnées JSON et heatmaps de poids.
Le contenu des CSV est déterministe: aucun horodatage n'y figure.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .graphs import ComparisonGraph
from .reweight import export_heatmap, export_weights

logger = logging.getLogger(__name__)

FORMAT_VERSION = '1.0'

Edge = Tuple[int, int]


class ResultSaver:
    """
    Écrit les sorties d'une exécution dans un dossier.

    Fichiers d'une expérience <name>:
        <name>.csv              Médianes par (n, méthode), schéma stable
        <name>_trials.csv       Une ligne par essai et par méthode
        <name>_diagnostics.csv  Moyennes et écarts interquartiles
        <name>.json             Configuration, décisions, avertissements
    """

    def __init__(self, out_directory: Optional[Union[str, Path]] = None):
        """
        Args:
            out_directory: Dossier de sortie (par défaut: ./results/)
        """
        self.out_directory = Path(out_directory) if out_directory is not None else Path('./results')
        self.out_directory.mkdir(parents=True, exist_ok=True)

    def _path(self, filename: str) -> Path:
        return self.out_directory / filename

    # ==================== Écriture ====================

    def save_table(self, filename: str, content: str) -> Path:
        """
        Écrit une table CSV déjà formatée.

        Returns:
            Chemin du fichier écrit
        """
        path = self._path(filename)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
        logger.info(f"Wrote {path}")
        return path

    def save_metadata(self, filename: str, metadata: Mapping[str, Any], timestamp: bool = False) -> Path:
        """
        Écrit un fichier JSON de métadonnées.

        Args:
            filename: Nom du fichier
            metadata: Données sérialisables
            timestamp: Ajouter la date d'écriture (rend le fichier non reproductible)
        """
        document: Dict[str, Any] = dict(metadata)
        document['format_version'] = FORMAT_VERSION
        if timestamp:
            document['written_at'] = datetime.now().isoformat()

        path = self._path(filename)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(document, f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")
        logger.info(f"Wrote {path}")
        return path

    def save_weights(self, filename: str, graph: ComparisonGraph, weights: Mapping[Edge, float]) -> Path:
        """Poids au format liste d'arêtes."""
        path = self._path(filename)
        export_weights(graph, weights, path)
        logger.info(f"Wrote {path}")
        return path

    def save_heatmap(self, filename: str, n: int, weights: Mapping[Edge, float]) -> Path:
        """Triplets (i, j, w) sur toutes les paires."""
        path = self._path(filename)
        export_heatmap(n, weights, path)
        logger.info(f"Wrote {path}")
        return path

    def save_experiment(self, result: Any, timestamp: bool = False) -> List[Path]:
        """
        Écrit toutes les tables d'un ExperimentResult.

        Args:
            result: Objet exposant name, to_csv(), trials_csv(),
                    diagnostics_csv() et metadata
            timestamp: Horodater le fichier de métadonnées

        Returns:
            Chemins écrits
        """
        name = result.name
        return [
            self.save_table(f"{name}.csv", result.to_csv()),
            self.save_table(f"{name}_trials.csv", result.trials_csv()),
            self.save_table(f"{name}_diagnostics.csv", result.diagnostics_csv()),
            self.save_metadata(f"{name}.json", result.metadata, timestamp=timestamp),
        ]

    # ==================== Lecture ====================

    def has_output(self, filename: str) -> bool:
        return self._path(filename).exists()

    def load_metadata(self, filename: str) -> Optional[Dict[str, Any]]:
        """
        Relit un fichier de métadonnées.

        Returns:
            Le document, ou None si le fichier n'existe pas
        """
        path = self._path(filename)
        if not path.exists():
            return None
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
