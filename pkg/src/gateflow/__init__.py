"""gateflow: a desk-scale SystemVerilog-to-gates synthesis flow."""

__version__ = "0.1.0"
