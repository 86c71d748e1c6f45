from foodkb.kb.store import Evidence, KBStore, KBTriple

__all__ = ["Evidence", "KBStore", "KBTriple"]
