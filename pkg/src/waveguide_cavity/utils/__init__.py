from waveguide_cavity.utils.seeding import default_seed, resolve_seed, substream  # noqa: F401

__all__ = ["default_seed", "resolve_seed", "substream"]
