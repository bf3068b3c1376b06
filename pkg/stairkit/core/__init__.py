"""Core numeric kernels"""
