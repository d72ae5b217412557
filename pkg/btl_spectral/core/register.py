"""
Register - Association entre identifiants et méthodes d'estimation

Le Register maintient la map des méthodes disponibles pour le harnais.
Le MethodLoader découvre les méthodes d'un package et les y enregistre.
"""

import importlib
import inspect
import logging
import pkgutil
from typing import Dict, List, Optional, Type

from .interfaces.method_interface import IRankingMethod

logger = logging.getLogger(__name__)


class Register:
    """
    Registre des méthodes d'estimation par identifiant.

    Format: method_id → instance de IRankingMethod
    """

    def __init__(self):
        self._methods: Dict[str, IRankingMethod] = {}

    def register_method(self, method: IRankingMethod) -> None:
        """
        Enregistre une méthode.

        Args:
            method: Instance de la méthode

        Une méthode déjà enregistrée sous le même id est remplacée.
        """
        if method.id in self._methods:
            logger.debug(f"Replacing method '{method.id}' in the register")
        self._methods[method.id] = method

    def unregister_method(self, method_id: str) -> bool:
        """
        Retire une méthode.

        Returns:
            True si la méthode a été retirée, False sinon
        """
        return self._methods.pop(method_id, None) is not None

    def get_method(self, method_id: str) -> Optional[IRankingMethod]:
        return self._methods.get(method_id)

    def has_method(self, method_id: str) -> bool:
        return method_id in self._methods

    def get_registered_ids(self) -> List[str]:
        """Identifiants enregistrés, triés."""
        return sorted(self._methods.keys())

    def clear(self) -> None:
        """Vide le registre."""
        self._methods.clear()

    def __repr__(self) -> str:
        return f"Register({len(self._methods)} methods)"

    def __str__(self) -> str:
        lines = ["Register:"]
        for method_id, method in sorted(self._methods.items()):
            lines.append(f"  {method_id} → {type(method).__name__}")
        return "\n".join(lines)


class MethodLoader:
    """
    Charge automatiquement les méthodes depuis un package.

    Cherche les classes concrètes qui héritent de IRankingMethod.
    """

    def __init__(self, package_path: str = 'btl_spectral.methods'):
        """
        Args:
            package_path: Chemin du package (ex: 'btl_spectral.methods')
        """
        self.package_path = package_path
        self.loaded_methods: List[Type[IRankingMethod]] = []

    def load_methods(self) -> List[Type[IRankingMethod]]:
        """
        Importe chaque module du package et collecte les classes de méthodes.

        Returns:
            Classes chargées, dans l'ordre des modules
        """
        self.loaded_methods = []
        package = importlib.import_module(self.package_path)

        for module_info in sorted(pkgutil.iter_modules(package.__path__), key=lambda m: m.name):
            if module_info.name.startswith('_'):
                continue
            full_module_path = f"{self.package_path}.{module_info.name}"
            try:
                module = importlib.import_module(full_module_path)
            except ImportError as e:
                logger.error(f"Could not import {full_module_path}: {e}")
                continue

            for name, obj in inspect.getmembers(module, inspect.isclass):
                if (issubclass(obj, IRankingMethod) and obj is not IRankingMethod
                        and not inspect.isabstract(obj) and obj.__module__ == module.__name__):
                    self.loaded_methods.append(obj)
                    logger.debug(f"Loaded method class {name} from {module_info.name}")

        return self.loaded_methods

    def register_methods(self, register: Register) -> int:
        """
        Instancie les classes chargées et les enregistre.

        Returns:
            Nombre de méthodes enregistrées
        """
        count = 0
        for method_class in self.loaded_methods:
            method = method_class()
            register.register_method(method)
            count += 1
        return count


def default_register() -> Register:
    """Register contenant toutes les méthodes du package btl_spectral.methods."""
    register = Register()
    loader = MethodLoader()
    loader.load_methods()
    loader.register_methods(register)
    return register
