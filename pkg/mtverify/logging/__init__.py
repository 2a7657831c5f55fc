"""Logging module"""
