"""Test suite for the RXL active expression toolkit."""
