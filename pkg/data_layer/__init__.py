# data_layer/__init__.py

from .FileHandler import FileHandler
from .DataValidator import DataValidator
from .ConfigManager import ConfigManager
from .RandomStreams import RandomStreams
from .TopologyManager import TopologyManager
from .MobilityGenerator import MobilityGenerator
from .ChannelModel import ChannelModel

__all__ = [
    'FileHandler',
    'DataValidator',
    'ConfigManager',
    'RandomStreams',
    'TopologyManager',
    'MobilityGenerator',
    'ChannelModel'
]
