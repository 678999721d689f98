"""
In-place parameter updates.
"""
import logging

import numpy as np

from noisecleaner.errors import NumericalError

logger = logging.getLogger(__name__)

OPTIMIZERS = ('adam', 'sgd')

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


def apply_update(params, grads, lr, optimizer='adam'):
    """
    Apply one optimizer step to `params` in place and increment its step counter.

    Args:
        params (ParameterSet): Parameters and optimizer state to update.
        grads (dict): Gradient per tensor name; names missing from the
            mapping are left untouched.
        lr (float): Learning rate, strictly positive.

    Keyword Arguments:
        optimizer (str): "adam" (beta1=0.9, beta2=0.999, eps=1e-8) or "sgd".

    Raises:
        ValueError: Non-positive learning rate or unknown optimizer.
        NumericalError: A gradient holds non-finite values.  Nothing is updated.

    """
    if not lr > 0:
        raise ValueError(u"Learning rate must be positive, got {}".format(lr))
    if optimizer not in OPTIMIZERS:
        raise ValueError(u"Unknown optimizer '{}'".format(optimizer))

    for name, grad in grads.items():
        if not np.all(np.isfinite(grad)):
            msg = u"Refusing update: gradient of '{}' is not finite".format(name)
            logger.warning(msg)
            raise NumericalError(msg)

    params.step += 1
    if optimizer == 'sgd':
        for name, grad in grads.items():
            params.tensors[name] -= lr * grad
        return

    correction1 = 1.0 - ADAM_BETA1 ** params.step
    correction2 = 1.0 - ADAM_BETA2 ** params.step
    for name, grad in grads.items():
        first, second = params.moments[name]
        first *= ADAM_BETA1
        first += (1.0 - ADAM_BETA1) * grad
        second *= ADAM_BETA2
        second += (1.0 - ADAM_BETA2) * grad * grad
        params.tensors[name] -= lr * (first / correction1) / (np.sqrt(second / correction2) + ADAM_EPSILON)
