# business_layer/__init__.py

from .ServingSetController import ServingSetController
from .HandoverController import HandoverController
from .PerformanceEvaluator import PerformanceEvaluator
from .SimulationController import SimulationController
from .ExportController import ExportController
from .LoggingService import LoggingService

__all__ = [
    'ServingSetController',
    'HandoverController',
    'PerformanceEvaluator',
    'SimulationController',
    'ExportController',
    'LoggingService'
]
