# -*- coding: utf-8 -*-
import logging
from abc import ABCMeta, abstractmethod
from typing import Callable, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from bernsteinpy.model.measures import ModelParams
from bernsteinpy.utils.base import replica_rng

logger = logging.getLogger(__name__)


class SimulatorBase(metaclass=ABCMeta):
    """Base class for all simulators in bernsteinpy."""

    # Default for child class. They need to be overwritten in child classes.
    name = None
    common_function = ['Replica Streams', 'Run Summary']
    special_function = []

    @classmethod
    def show_info(cls) -> None:
        """Display which functions the simulator will provide."""
        print("*-*" * 2, cls.name, "is running ...", "*-*" * 2)
        print("Expected Functionality:")
        function = cls.common_function + cls.special_function
        for i in range(len(function)):
            print("+ ", function[i])

    def __init__(self, params: ModelParams, seed: int = 0, n_jobs: int = 1, stream: Tuple[int, ...] = ()) -> None:
        self.params = params
        self.seed = int(seed)
        self.n_jobs = n_jobs
        # prefix of every spawn key, so one seed can drive several independent simulators
        self.stream = tuple(stream)

    def rng(self, index: int) -> np.random.Generator:
        """The private stream of replica (or replica block) ``index``."""
        return replica_rng(self.seed, *self.stream, index)

    def fan_out(self, task: Callable[[int], np.ndarray], indices: Sequence[int]) -> List[np.ndarray]:
        """Run ``task`` for every index, in parallel when ``n_jobs`` allows; results keep index order."""
        if self.n_jobs == 1 or len(indices) <= 1:
            return [task(index) for index in indices]
        logger.debug(f"{self.name}: fan out {len(indices)} tasks over n_jobs = {self.n_jobs}")
        return Parallel(n_jobs=self.n_jobs)(delayed(task)(index) for index in indices)

    @abstractmethod
    def summary(self) -> dict:
        """Placeholder for the run description. Child classes should implement this method!"""
        return dict()
