"""
Shared Field Types

Complex numbers travel through configs and reports as [re, im] pairs.
"""

from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator


def as_complex(value: Any) -> complex:
    """Coerce a number, a string, or an [re, im] pair into a complex scalar."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("complex values must be given as [re, im]")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def complex_pair(value: complex) -> list[float]:
    """Serialize a complex scalar as [re, im]."""
    return [float(value.real), float(value.imag)]


ComplexNumber = Annotated[
    Any,
    PlainValidator(as_complex),
    PlainSerializer(complex_pair, return_type=list),
]
