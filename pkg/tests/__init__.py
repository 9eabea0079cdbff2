# -*- coding: utf-8 -*-

"""Tests for frac_ham."""
