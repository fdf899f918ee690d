"""
Evaluación de barridos en un pool de hilos con barra de progreso.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from .env import get_int

T = TypeVar('T')
R = TypeVar('R')


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """Número de hilos: el pedido, DEFAULT_JOBS o el número de CPUs si es 0"""
    jobs = get_int('DEFAULT_JOBS') if jobs is None else jobs
    return jobs if jobs > 0 else (os.cpu_count() or 1)


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = None, desc: str = 'sweep') -> List[R]:
    """
    Aplica `fn` a cada elemento conservando el orden de entrada.

    Args:
        fn: Función pura
        items: Puntos del barrido
        jobs: Hilos (None usa DEFAULT_JOBS)
        desc: Etiqueta de la barra de progreso

    Returns:
        Resultados en el orden de `items`
    """
    workers = resolve_jobs(jobs)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in tqdm(items, desc=f"{desc:<20}", disable=len(items) <= 1, leave=False)]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(tqdm(pool.map(fn, items), total=len(items), desc=f"{desc:<20}", leave=False))
