from foodkb.service.projects import ProjectError, ProjectManager, ProjectNotFound, StateConflict

__all__ = ["ProjectError", "ProjectManager", "ProjectNotFound", "StateConflict"]
