import logging
from typing import Optional

from ..core.exceptions import ConfigError, UnicodecException
from .config import SchemeDescriptor
from .schemes import Codec, Scheme, builtin_schemes

logger = logging.getLogger(__name__)


class SchemeRegistry:
    """
    Scheme registry

    Maps the ``family`` of a scheme descriptor to the Scheme that builds it.
    """

    def __init__(self):
        self._schemes: dict[str, Scheme] = {}

    def register_scheme(self, scheme: Scheme, verbose: bool = True):
        """Register a scheme in the registry.

        Args:
            scheme (Scheme): The scheme to register.
            verbose (bool): Print a status line. Default is True.
        """
        if scheme.family in self._schemes and verbose:
            print(f"Scheme '{scheme.family}' is already registered and will be overwritten.")
        self._schemes[scheme.family] = scheme
        if verbose:
            print(f"✅Scheme '{scheme.family}' has been registered.")

    def get_scheme(self, family: str) -> Optional[Scheme]:
        """Get a scheme by family name"""
        return self._schemes.get(family)

    def unregister(self, family: str):
        """Unregister a scheme by family name"""
        if family in self._schemes:
            del self._schemes[family]
            print(f"Scheme '{family}' has been unregistered.")
        else:
            print(f"No scheme named '{family}' found to unregister.")

    def resolve(self, descriptor: SchemeDescriptor) -> Codec:
        """Build the codec a descriptor names.

        Raises:
            ConfigError: Unknown family, invalid parameters, or a code that cannot be built.
        """
        scheme = self.get_scheme(descriptor.family)
        if scheme is None:
            raise ConfigError(f"unknown scheme family '{descriptor.family}'; registered: {self.list_all()}")
        try:
            codec = scheme.codec(descriptor)
        except ConfigError:
            raise
        except (UnicodecException, OSError) as exc:
            raise ConfigError(f"cannot build scheme '{descriptor.family}': {exc}") from exc
        logger.debug("resolved %s -> %s", descriptor.family, codec.describe())
        return codec

    def get_schemes_description(self) -> str:
        """
        Get formatted descriptions for all registered schemes

        Returns:
            One "family: description" line per scheme
        """
        lines = [f"{s.family}: {s.description}" for s in self._schemes.values()]
        return "\n".join(lines) if lines else "No schemes registered."

    def list_all(self) -> list[str]:
        """List all registered family names"""
        return list(self._schemes.keys())

    def clear(self):
        """Clear all registered schemes"""
        self._schemes.clear()
        print("All schemes have been cleared.")


def default_registry() -> SchemeRegistry:
    registry = SchemeRegistry()
    for scheme in builtin_schemes():
        registry.register_scheme(scheme, verbose=False)
    return registry


# Global scheme registry
global_registry = default_registry()
