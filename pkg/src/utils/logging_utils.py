"""
Logging utilities for the spectral-colorings toolkit.
Provides decorators and helper functions for enhanced logging.
"""

import logging
import functools
import time
from typing import Any, Callable, Dict, Optional
import traceback

from .helpers import format_duration


def log_command_execution(func: Callable) -> Callable:
    """
    Decorator to log CLI command handlers, including timing and errors.

    Args:
        func: The command handler to wrap; its first argument is a RunConfig

    Returns:
        Wrapped function with logging
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(f"command.{func.__name__}")

        config = args[0] if args else kwargs.get("config")
        action = getattr(config, "action", None) or "default"

        start_time = time.time()

        logger.info(f"Command '{func.__name__}' started (action: {action})")
        logger.debug(f"Command '{func.__name__}' args: {len(args)} kwargs: {len(kwargs)}")

        try:
            result = func(*args, **kwargs)
            execution_time = time.time() - start_time

            logger.info(f"Command '{func.__name__}' completed in {format_duration(execution_time)}")
            return result

        except Exception as e:
            execution_time = time.time() - start_time

            logger.error(f"Command '{func.__name__}' failed after {format_duration(execution_time)}")
            logger.error(f"Error in command '{func.__name__}': {str(e)}")
            logger.debug(f"Traceback:\n{traceback.format_exc()}")

            raise

    return wrapper


def log_computation(operation_name: str, level: int = logging.INFO):
    """
    Decorator to log heavy computations such as enumerations, eigen-solves and sweeps.

    Args:
        operation_name: Name of the operation for logging
        level: Level for the start/finish messages; per-instance oracle work uses DEBUG

    Returns:
        Decorator function
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            logger = logging.getLogger(f"compute.{operation_name}")

            start_time = time.time()
            logger.log(level, f"Starting {operation_name}")

            try:
                result = func(*args, **kwargs)
                execution_time = time.time() - start_time

                if hasattr(result, "shape"):
                    logger.log(level, f"{operation_name} completed in {execution_time:.3f}s - Result shape: {result.shape}")
                elif isinstance(result, (list, tuple, dict)):
                    logger.log(level, f"{operation_name} completed in {execution_time:.3f}s - Result length: {len(result)}")
                else:
                    logger.log(level, f"{operation_name} completed in {execution_time:.3f}s")

                return result

            except Exception as e:
                execution_time = time.time() - start_time

                logger.error(f"{operation_name} failed after {execution_time:.3f}s: {str(e)}")
                logger.debug(f"Traceback:\n{traceback.format_exc()}")

                raise

        return wrapper
    return decorator


def log_file_operation(func: Callable) -> Callable:
    """
    Decorator to log file operations like instance loads and report saves.

    Args:
        func: The function to wrap

    Returns:
        Wrapped function with logging
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(f"file.{func.__name__}")

        start_time = time.time()

        # Methods receive self first; the path is the first string argument
        filename = next((a for a in args if isinstance(a, str)), None)
        filename = filename or kwargs.get("file_path", "unknown")

        logger.info(f"File operation '{func.__name__}' on: {filename}")

        try:
            result = func(*args, **kwargs)
            execution_time = time.time() - start_time

            logger.info(f"File operation '{func.__name__}' completed in {execution_time:.3f}s")
            return result

        except Exception as e:
            execution_time = time.time() - start_time

            logger.error(f"File operation '{func.__name__}' failed after {execution_time:.3f}s")
            logger.error(f"Error in file operation '{func.__name__}': {str(e)}")
            logger.error(f"File: {filename}")
            logger.error(f"Traceback:\n{traceback.format_exc()}")

            raise

    return wrapper


def log_run_config(config: Any):
    """
    Log the resolved run configuration of a CLI invocation.

    Args:
        config: RunConfig (anything with to_dict())
    """
    logger = logging.getLogger("run.config")
    logger.info(f"Run: {config.subcommand} {config.action or ''}".rstrip())
    logger.debug(f"Resolved config: {config.to_dict()}")


def log_performance_metric(metric_name: str, value: float, unit: str = ""):
    """
    Log performance metrics.

    Args:
        metric_name: Name of the metric
        value: Metric value
        unit: Optional unit description
    """
    logger = logging.getLogger("performance")

    unit_str = f" {unit}" if unit else ""
    logger.info(f"Performance metric - {metric_name}: {value:.3f}{unit_str}")


def log_data_summary(data, operation: str = ""):
    """
    Log summary information about an array, table or instance.

    Args:
        data: Data to summarize (ndarray, DataFrame, instance, list)
        operation: Optional operation description
    """
    logger = logging.getLogger("data.summary")

    operation_str = f" after {operation}" if operation else ""

    if hasattr(data, "graph") and hasattr(data, "lists"):
        logger.info(
            f"Instance summary{operation_str}: n={data.n}, edges={data.graph.edge_count}, "
            f"q={data.q}, max degree={data.graph.max_degree}"
        )
    elif hasattr(data, "shape"):
        logger.info(f"Data summary{operation_str}: Shape {data.shape}")
        if hasattr(data, "columns"):
            logger.debug(f"Columns: {list(data.columns)}")
    elif hasattr(data, "__len__"):
        logger.info(f"Data summary{operation_str}: Length {len(data)}")
    else:
        logger.info(f"Data summary{operation_str}: Type {type(data)}")


def log_error_with_context(error: Exception, context: Optional[Dict[str, Any]] = None):
    """
    Log an error with additional context information.

    Args:
        error: The exception that occurred
        context: Optional dictionary with context information
    """
    logger = logging.getLogger("error.context")

    logger.error(f"Error occurred: {str(error)}")

    if context:
        logger.error(f"Context: {context}")

    logger.debug(f"Traceback:\n{traceback.format_exc()}")
